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

#ifndef PROVSHIFT_HARNESS_H_
#define PROVSHIFT_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "provshift/corpus.h"
#include "provshift/featurize.h"
#include "provshift/metrics.h"
#include "provshift/model.h"
#include "provshift/shift_sampler.h"

namespace provshift {

struct ExperimentConfig {
  // Exactly one of corpus / synthetic is used; synthetic wins when set.
  std::filesystem::path corpus;
  std::optional<SynthConfig> synthetic;
  // "unigram" or "embedding:<path to embedding JSONL>".
  std::string representation = "unigram";
  double a0_train = 0.5;
  double a1_train = 0.2;
  std::size_t train_size = 2000;
  std::size_t test_size = 500;
  GridAxis q = GridAxis::Range(0.10, 0.90, 0.05);
  GridAxis alpha_test = GridAxis::Range(0.0, 10.0, 0.05);
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::uint64_t global_seed = 0;
  double v = 10.0;
  double l2_strength = ModelConfig{}.l2_strength;
  std::vector<ModelMode> modes = {ModelMode::kBackdoor, ModelMode::kVanilla};
  std::filesystem::path output_dir;
  unsigned threads = 1;

  // Throws ConfigError on empty grids, duplicate seeds or bad strings.
  void Validate() const;
  FeatureKind representation_kind() const;
  std::filesystem::path embedding_path() const;
  GridSpec grid() const;
};

// Relative paths are resolved against base_dir.
ExperimentConfig ExperimentConfigFromJson(
    const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

struct FailureRecord {
  double q = 0.0;
  double alpha_test = 0.0;
  std::uint64_t seed = 0;
  std::string reason;
};

struct SweepResult {
  std::vector<ShiftSetting> settings;  // feasible grid points
  std::vector<EvalRecord> records;     // sorted
  std::vector<AggregateRow> aggregate;
  std::vector<FailureRecord> failures;
};

// Feature space of one run, built from the training split alone.
FeatureSpace BuildRunSpace(const Corpus& corpus, const SplitIndices& split,
                           FeatureKind kind, double v,
                           const EmbeddingTable* table);

// One split: draw, featurize from the training part, train every mode,
// score the test part. Throws on failure.
std::vector<EvalRecord> RunSetting(const ShiftSetting& setting,
                                   std::uint64_t repeat_seed,
                                   const Corpus& corpus,
                                   const EmbeddingTable* table,
                                   const ExperimentConfig& cfg);

// Every feasible setting x seed. Failures are collected, never thrown.
SweepResult RunSweep(const ExperimentConfig& cfg, const Corpus& corpus,
                     const EmbeddingTable* table);

// Loads the corpus (or generates it) and the embedding table, runs the
// sweep and, if cfg.output_dir is set, writes results.csv, aggregate.csv,
// failures.csv and settings.json there.
SweepResult RunSweep(const ExperimentConfig& cfg);

void WriteSweepOutputs(const SweepResult& result,
                       const std::filesystem::path& dir);

}  // namespace provshift

#endif  // PROVSHIFT_HARNESS_H_
