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

#ifndef PROVSHIFT_MODEL_H_
#define PROVSHIFT_MODEL_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "provshift/featurize.h"
#include "provshift/optimizer.h"

namespace provshift {

enum class ModelMode { kBackdoor, kVanilla };

std::string_view ModelModeName(ModelMode mode);
// Accepts "backdoor" / "ba" and "vanilla". Throws ConfigError.
ModelMode ParseModelMode(std::string_view name);

struct ModelConfig {
  double v = 10.0;
  // Objective: mean negative log-likelihood + (l2_strength / 2) * |w|^2.
  // The default equals an inverse-regularization C = 1 on the summed
  // log-likelihood at 2000 training documents.
  double l2_strength = 5e-4;
  bool fit_intercept = true;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;
  ModelMode mode = ModelMode::kBackdoor;

  void Validate() const;
};

// Empirical P(z = c) over the training sources.
std::vector<double> EstimateSourcePriors(std::span<const int> sources,
                                         std::size_t num_sources = 2);

double Sigmoid(double s);

// Mean logistic loss over rows plus (lambda/2)|w|^2, with parameters laid
// out as [intercept, w_0 .. w_{d-1}]. The intercept is never penalized and
// is pinned at zero when fit_intercept is false.
class LogisticObjective : public TwiceDifferentiable {
 public:
  LogisticObjective(std::span<const FeatureVector> rows,
                    std::span<const int> labels, double lambda,
                    bool fit_intercept);

  std::size_t dimension() const override { return 1 + width_; }
  double Evaluate(std::span<const double> x,
                  std::span<double> grad) const override;
  LinearOperator Hessian(std::span<const double> x) const override;

 private:
  std::span<const FeatureVector> rows_;
  std::span<const int> labels_;
  double lambda_;
  bool fit_intercept_;
  std::size_t width_;
};

struct FitReport {
  int iterations = 0;
  double objective = 0.0;
  double objective_at_zero = 0.0;
  double gradient_inf_norm = 0.0;
  bool converged = false;
  std::string message;
};

struct TrainedModel {
  ModelMode mode = ModelMode::kBackdoor;
  double beta0 = 0.0;
  std::vector<double> beta1;  // one per base feature
  std::vector<double> beta2;  // one per source; empty in vanilla mode
  std::vector<double> source_priors;
  FeatureSpace space;
  ModelConfig config;
  FitReport fit;
};

// Trains on base (non-augmented) vectors. Backdoor mode augments each row
// with its true source before fitting; vanilla mode uses the base vectors
// alone. Requires both labels to be present (ConfigError otherwise).
TrainedModel Train(std::span<const FeatureVector> base_vectors,
                   std::span<const int> labels, std::span<const int> sources,
                   const FeatureSpace& space, const ModelConfig& config);

// Sum over c of P(z_c) * sigmoid(beta0 + beta1.x + beta2[c] * v).
// Throws ModeError for vanilla models.
double PredictBackdoor(const TrainedModel& model, const FeatureVector& x);
// sigmoid(beta0 + beta1.x). Throws ModeError for backdoor models.
double PredictVanilla(const TrainedModel& model, const FeatureVector& x);
// Dispatches on model.mode.
double Predict(const TrainedModel& model, const FeatureVector& x);

// P(y=1 | x, z=c) of a backdoor model.
double PredictConditional(const TrainedModel& model, const FeatureVector& x,
                          std::size_t c);

nlohmann::json ModelToJson(const TrainedModel& model);
TrainedModel ModelFromJson(const nlohmann::json& j);
void SaveModel(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel LoadModel(const std::filesystem::path& path);

}  // namespace provshift

#endif  // PROVSHIFT_MODEL_H_
