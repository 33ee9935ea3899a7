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

#ifndef PROVSHIFT_OPTIMIZER_H_
#define PROVSHIFT_OPTIMIZER_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace provshift {

using LinearOperator =
    std::function<void(std::span<const double>, std::span<double>)>;

// A smooth convex objective with Hessian-vector products.
class TwiceDifferentiable {
 public:
  virtual ~TwiceDifferentiable() = default;
  virtual std::size_t dimension() const = 0;
  // Returns f(x) and writes the gradient into grad.
  virtual double Evaluate(std::span<const double> x,
                          std::span<double> grad) const = 0;
  // Hessian at x as an operator d -> H d.
  virtual LinearOperator Hessian(std::span<const double> x) const = 0;
};

struct OptimizerOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;  // on the infinity norm
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

// Truncated Newton: each outer step solves H d = -g by conjugate gradients
// to a relative tolerance min(0.5, sqrt(|g|)), then backtracks from the
// full step. Deterministic for a given objective and starting point.
// Throws NumericalError if the objective becomes non-finite.
OptimizerResult MinimizeNewtonCg(const TwiceDifferentiable& objective,
                                 std::vector<double> x0,
                                 const OptimizerOptions& options);

double InfNorm(std::span<const double> v);

}  // namespace provshift

#endif  // PROVSHIFT_OPTIMIZER_H_
