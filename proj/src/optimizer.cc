// Copyright 2026 The provshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "provshift/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "provshift/errors.h"

namespace provshift {
namespace {

double DotProduct(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Approximately solves H d = -g. Stops early on non-positive curvature and
// returns whatever has been accumulated (or -g if nothing was).
std::vector<double> ConjugateGradient(const LinearOperator& hessian,
                                      std::span<const double> grad,
                                      double tolerance, int max_steps) {
  const std::size_t n = grad.size();
  std::vector<double> d(n, 0.0), r(n), p(n), hp(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = -grad[i];
  p = r;
  double rr = DotProduct(r, r);
  for (int k = 0; k < max_steps && std::sqrt(rr) > tolerance; ++k) {
    std::fill(hp.begin(), hp.end(), 0.0);
    hessian(p, hp);
    const double curvature = DotProduct(p, hp);
    if (!(curvature > 0.0)) {
      if (k == 0) d = r;
      break;
    }
    const double step = rr / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] += step * p[i];
      r[i] -= step * hp[i];
    }
    const double rr_next = DotProduct(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return d;
}

}  // namespace

double InfNorm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

OptimizerResult MinimizeNewtonCg(const TwiceDifferentiable& objective,
                                 std::vector<double> x0,
                                 const OptimizerOptions& options) {
  const std::size_t n = objective.dimension();
  if (x0.size() != n) throw DomainError("starting point has wrong dimension");

  OptimizerResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n), trial(n), trial_grad(n);
  double value = objective.Evaluate(result.x, grad);
  if (!std::isfinite(value)) {
    throw NumericalError("objective is not finite at the starting point");
  }
  const int max_cg_steps = static_cast<int>(std::max<std::size_t>(2 * n, 50));

  int iter = 0;
  for (;; ++iter) {
    const double gnorm = InfNorm(grad);
    if (!std::isfinite(gnorm)) {
      throw NumericalError("gradient is not finite at iteration " +
                           std::to_string(iter));
    }
    if (gnorm < options.gradient_tolerance) {
      result.converged = true;
      result.message = "gradient tolerance reached";
      break;
    }
    if (iter >= options.max_iterations) {
      result.message = "iteration limit reached";
      break;
    }

    const double g2 = std::sqrt(DotProduct(grad, grad));
    const double forcing = std::min(0.5, std::sqrt(g2));
    std::vector<double> direction = ConjugateGradient(
        objective.Hessian(result.x), grad, forcing * g2, max_cg_steps);
    double slope = DotProduct(grad, direction);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      slope = -g2 * g2;
    }

    // Backtracking. Near the optimum the decrease in f drops below double
    // resolution, so a step that leaves f unchanged to rounding but shrinks
    // the gradient is also accepted.
    bool accepted = false;
    double step = 1.0;
    double trial_value = value;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = result.x[i] + step * direction[i];
      }
      trial_value = objective.Evaluate(trial, trial_grad);
      if (!std::isfinite(trial_value)) continue;
      const bool armijo = trial_value <= value + 1e-4 * step * slope;
      const bool flat =
          std::abs(trial_value - value) <=
              8.0 * std::numeric_limits<double>::epsilon() *
                  std::max(1.0, std::abs(value)) &&
          InfNorm(trial_grad) < gnorm;
      if (armijo || flat) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.message = "line search failed";
      break;
    }
    result.x.swap(trial);
    grad.swap(trial_grad);
    value = trial_value;
  }

  result.value = value;
  result.gradient_inf_norm = InfNorm(grad);
  result.iterations = iter;
  return result;
}

}  // namespace provshift
