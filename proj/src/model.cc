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

#include "provshift/model.h"

#include <cmath>
#include <fstream>

#include "provshift/errors.h"

namespace provshift {

std::string_view ModelModeName(ModelMode mode) {
  return mode == ModelMode::kBackdoor ? "backdoor" : "vanilla";
}

ModelMode ParseModelMode(std::string_view name) {
  if (name == "backdoor" || name == "ba") return ModelMode::kBackdoor;
  if (name == "vanilla") return ModelMode::kVanilla;
  throw ConfigError("unknown model mode '" + std::string(name) + "'");
}

void ModelConfig::Validate() const {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("v must be positive");
  if (!(l2_strength > 0.0)) throw ConfigError("l2 strength must be positive");
  if (!(gradient_tolerance > 0.0)) {
    throw ConfigError("gradient tolerance must be positive");
  }
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
}

std::vector<double> EstimateSourcePriors(std::span<const int> sources,
                                         std::size_t num_sources) {
  if (sources.empty()) throw ConfigError("empty training set");
  std::vector<double> counts(num_sources, 0.0);
  for (int z : sources) {
    if (z < 0 || static_cast<std::size_t>(z) >= num_sources) {
      throw DomainError("source " + std::to_string(z) + " out of range");
    }
    counts[static_cast<std::size_t>(z)] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(sources.size());
  return counts;
}

double Sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(s)) without overflow.
double Softplus(double s) {
  return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

}  // namespace

LogisticObjective::LogisticObjective(std::span<const FeatureVector> rows,
                                     std::span<const int> labels,
                                     double lambda, bool fit_intercept)
    : rows_(rows),
      labels_(labels),
      lambda_(lambda),
      fit_intercept_(fit_intercept),
      width_(rows.empty() ? 0 : rows.front().size()) {
  if (rows.empty()) throw ConfigError("no training rows");
  if (rows.size() != labels.size()) {
    throw DomainError("rows and labels differ in length");
  }
  for (const auto& r : rows) {
    if (r.size() != width_) throw DomainError("rows differ in width");
  }
}

double LogisticObjective::Evaluate(std::span<const double> x,
                                   std::span<double> grad) const {
  const double b = x[0];
  const auto w = x.subspan(1);
  auto gw = grad.subspan(1);
  std::fill(grad.begin(), grad.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(rows_.size());
  double loss = 0.0;
  double gb = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double s = b + rows_[i].Dot(w);
    const double y = labels_[i];
    loss += Softplus(s) - y * s;
    const double r = (Sigmoid(s) - y) * inv_n;
    gb += r;
    rows_[i].AddScaled(gw, r);
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < width_; ++j) {
    penalty += w[j] * w[j];
    gw[j] += lambda_ * w[j];
  }
  grad[0] = fit_intercept_ ? gb : 0.0;
  return loss * inv_n + 0.5 * lambda_ * penalty;
}

LinearOperator LogisticObjective::Hessian(std::span<const double> x) const {
  const double inv_n = 1.0 / static_cast<double>(rows_.size());
  std::vector<double> weights(rows_.size());
  const auto w = x.subspan(1);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double p = Sigmoid(x[0] + rows_[i].Dot(w));
    weights[i] = p * (1.0 - p) * inv_n;
  }
  return [this, weights = std::move(weights)](std::span<const double> d,
                                              std::span<double> out) {
    const auto dw = d.subspan(1);
    auto ow = out.subspan(1);
    double ob = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double t = weights[i] * ((fit_intercept_ ? d[0] : 0.0) +
                                     rows_[i].Dot(dw));
      ob += t;
      rows_[i].AddScaled(ow, t);
    }
    for (std::size_t j = 0; j < width_; ++j) ow[j] += lambda_ * dw[j];
    out[0] += fit_intercept_ ? ob : d[0];
  };
}

TrainedModel Train(std::span<const FeatureVector> base_vectors,
                   std::span<const int> labels, std::span<const int> sources,
                   const FeatureSpace& space, const ModelConfig& config) {
  config.Validate();
  if (base_vectors.size() != labels.size() ||
      base_vectors.size() != sources.size()) {
    throw DomainError("vectors, labels and sources differ in length");
  }
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw ConfigError("training set needs at least one example of each label");
  }

  const FeatureSpace used_space =
      space.v() == config.v
          ? space
          : (space.kind() == FeatureKind::kUnigram
                 ? FeatureSpace::Unigram(space.vocabulary(), config.v,
                                         space.num_sources())
                 : FeatureSpace::Embedding(space.dim(), config.v,
                                           space.num_sources()));

  std::vector<FeatureVector> rows;
  rows.reserve(base_vectors.size());
  for (std::size_t i = 0; i < base_vectors.size(); ++i) {
    const FeatureVector& base = base_vectors[i];
    if (base.dim() != used_space.dim()) {
      throw DomainError("feature vector dimension does not match space");
    }
    if (config.mode == ModelMode::kBackdoor) {
      rows.push_back(
          Augment(base, static_cast<std::size_t>(sources[i]), used_space));
    } else {
      rows.push_back(base.BaseOnly());
    }
  }

  const LogisticObjective objective(rows, labels, config.l2_strength,
                                    config.fit_intercept);
  std::vector<double> zero(objective.dimension(), 0.0);
  std::vector<double> scratch(objective.dimension());
  const double at_zero = objective.Evaluate(zero, scratch);

  OptimizerOptions options;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.gradient_tolerance;
  OptimizerResult fit;
  try {
    fit = MinimizeNewtonCg(objective, std::move(zero), options);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("training failed (") +
                         std::string(ModelModeName(config.mode)) + ", " +
                         std::to_string(rows.size()) + " rows, lambda=" +
                         std::to_string(config.l2_strength) + "): " + e.what());
  }

  TrainedModel model{.mode = config.mode,
                     .beta0 = fit.x[0],
                     .beta1 = {},
                     .beta2 = {},
                     .source_priors = EstimateSourcePriors(
                         sources, used_space.num_sources()),
                     .space = used_space,
                     .config = config,
                     .fit = {}};
  const std::size_t d = used_space.dim();
  model.beta1.assign(fit.x.begin() + 1,
                     fit.x.begin() + 1 + static_cast<std::ptrdiff_t>(d));
  if (config.mode == ModelMode::kBackdoor) {
    model.beta2.assign(fit.x.begin() + 1 + static_cast<std::ptrdiff_t>(d),
                       fit.x.end());
  }
  model.fit = {.iterations = fit.iterations,
               .objective = fit.value,
               .objective_at_zero = at_zero,
               .gradient_inf_norm = fit.gradient_inf_norm,
               .converged = fit.converged,
               .message = fit.message};
  return model;
}

namespace {

double BaseLogit(const TrainedModel& model, const FeatureVector& x) {
  if (x.dim() != model.beta1.size()) {
    throw DomainError("feature vector dimension does not match model");
  }
  const FeatureVector base = x.augmented() ? x.BaseOnly() : x;
  return model.beta0 + base.Dot(model.beta1);
}

}  // namespace

double PredictConditional(const TrainedModel& model, const FeatureVector& x,
                          std::size_t c) {
  if (model.mode != ModelMode::kBackdoor) {
    throw ModeError("conditional prediction needs a backdoor model");
  }
  if (c >= model.beta2.size()) throw DomainError("source out of range");
  return Sigmoid(BaseLogit(model, x) + model.beta2[c] * model.space.v());
}

double PredictBackdoor(const TrainedModel& model, const FeatureVector& x) {
  if (model.mode != ModelMode::kBackdoor) {
    throw ModeError("backdoor prediction called on a vanilla model");
  }
  const double base = BaseLogit(model, x);
  double p = 0.0;
  for (std::size_t c = 0; c < model.beta2.size(); ++c) {
    p += model.source_priors[c] *
         Sigmoid(base + model.beta2[c] * model.space.v());
  }
  return p;
}

double PredictVanilla(const TrainedModel& model, const FeatureVector& x) {
  if (model.mode != ModelMode::kVanilla) {
    throw ModeError("vanilla prediction called on a backdoor model");
  }
  return Sigmoid(BaseLogit(model, x));
}

double Predict(const TrainedModel& model, const FeatureVector& x) {
  return model.mode == ModelMode::kBackdoor ? PredictBackdoor(model, x)
                                            : PredictVanilla(model, x);
}

nlohmann::json ModelToJson(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["mode"] = ModelModeName(model.mode);
  j["v"] = model.space.v();
  j["lambda"] = model.config.l2_strength;
  j["fit_intercept"] = model.config.fit_intercept;
  j["beta0"] = model.beta0;
  j["beta1"] = model.beta1;
  j["beta2"] = model.beta2;
  j["source_priors"] = model.source_priors;
  j["num_sources"] = model.space.num_sources();
  j["feature_space_kind"] = FeatureKindName(model.space.kind());
  if (model.space.kind() == FeatureKind::kUnigram) {
    j["vocabulary"] = model.space.vocabulary();
  } else {
    j["dim"] = model.space.dim();
  }
  return j;
}

TrainedModel ModelFromJson(const nlohmann::json& j) {
  try {
    TrainedModel m;
    m.mode = ParseModelMode(j.at("mode").get<std::string>());
    m.config.mode = m.mode;
    m.config.v = j.at("v").get<double>();
    m.config.l2_strength = j.at("lambda").get<double>();
    m.config.fit_intercept = j.value("fit_intercept", true);
    m.beta0 = j.at("beta0").get<double>();
    m.beta1 = j.at("beta1").get<std::vector<double>>();
    m.beta2 = j.at("beta2").get<std::vector<double>>();
    m.source_priors = j.at("source_priors").get<std::vector<double>>();
    const auto num_sources = j.value("num_sources", m.source_priors.size());
    const auto kind = j.at("feature_space_kind").get<std::string>();
    if (kind == "unigram") {
      m.space = FeatureSpace::Unigram(
          j.at("vocabulary").get<std::vector<std::string>>(), m.config.v,
          num_sources);
    } else if (kind == "embedding") {
      m.space = FeatureSpace::Embedding(j.at("dim").get<std::size_t>(),
                                        m.config.v, num_sources);
    } else {
      throw FormatError("unknown feature_space_kind '" + kind + "'");
    }
    if (m.beta1.size() != m.space.dim()) {
      throw FormatError("beta1 length does not match the feature space");
    }
    if (m.source_priors.size() != num_sources ||
        (m.mode == ModelMode::kBackdoor && m.beta2.size() != num_sources) ||
        (m.mode == ModelMode::kVanilla && !m.beta2.empty())) {
      throw FormatError("beta2/source_priors length mismatch");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void SaveModel(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << ModelToJson(model).dump(2) << '\n';
}

TrainedModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  return ModelFromJson(j);
}

}  // namespace provshift
