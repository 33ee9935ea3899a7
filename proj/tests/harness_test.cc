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

#include "provshift/harness.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "provshift/errors.h"

namespace provshift {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("provshift_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig SmallConfig() {
  ExperimentConfig cfg;
  cfg.synthetic = SynthConfig{};
  cfg.train_size = 400;
  cfg.test_size = 100;
  cfg.q = GridAxis::List({0.5});
  cfg.alpha_test = GridAxis::List({1.0});
  return cfg;
}

std::string ResultsText(const SweepResult& r) {
  std::ostringstream out;
  WriteResultsCsv(r.records, out);
  return out.str();
}

TEST(RunSweep, OneSettingFiveSeedsTwoModes) {
  const ExperimentConfig cfg = SmallConfig();
  const SweepResult r = RunSweep(cfg);
  EXPECT_EQ(r.settings.size(), 1u);
  EXPECT_TRUE(r.failures.empty());
  ASSERT_EQ(r.records.size(), 10u);
  std::set<std::pair<std::uint64_t, ModelMode>> keys;
  for (const auto& rec : r.records) {
    keys.insert({rec.seed, rec.mode});
    EXPECT_GE(rec.auprc, 0.0);
    EXPECT_LE(rec.auprc, 1.0);
    EXPECT_EQ(rec.representation, "unigram");
  }
  EXPECT_EQ(keys.size(), 10u);
  EXPECT_EQ(r.aggregate.size(), 2u);
}

TEST(RunSweep, RowCountIsSettingsTimesSeedsTimesModes) {
  ExperimentConfig cfg = SmallConfig();
  cfg.q = GridAxis::List({0.3, 0.9});
  cfg.alpha_test = GridAxis::List({0.1, 2.0, 40.0});
  cfg.seeds = {3, 7};
  cfg.modes = {ModelMode::kVanilla};
  const SweepResult r = RunSweep(cfg);
  const std::size_t feasible =
      EnumerateGrid(GenerateSynthetic(*cfg.synthetic).pool_counts(),
                    cfg.grid())
          .size();
  EXPECT_EQ(r.settings.size(), feasible);
  EXPECT_LT(feasible, cfg.grid().CandidateCount());
  EXPECT_EQ(r.records.size(), feasible * cfg.seeds.size() * cfg.modes.size());
}

TEST(RunSweep, RerunIsByteIdentical) {
  ExperimentConfig cfg = SmallConfig();
  cfg.alpha_test = GridAxis::List({0.4, 3.0});
  cfg.output_dir = ScratchDir("rerun_a");
  RunSweep(cfg);
  const fs::path first = cfg.output_dir;
  cfg.output_dir = ScratchDir("rerun_b");
  RunSweep(cfg);
  for (const char* name : {"results.csv", "aggregate.csv", "failures.csv",
                           "settings.json"}) {
    const std::string a = ReadFile(first / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, ReadFile(cfg.output_dir / name)) << name;
  }
}

TEST(RunSweep, ThreadCountDoesNotChangeResults) {
  ExperimentConfig cfg = SmallConfig();
  cfg.q = GridAxis::List({0.3, 0.6});
  cfg.alpha_test = GridAxis::List({0.4, 2.0});
  const std::string serial = ResultsText(RunSweep(cfg));
  cfg.threads = 4;
  EXPECT_EQ(ResultsText(RunSweep(cfg)), serial);
}

TEST(RunSweep, GlobalSeedChangesSplits) {
  ExperimentConfig cfg = SmallConfig();
  const std::string a = ResultsText(RunSweep(cfg));
  cfg.global_seed = 99;
  EXPECT_NE(ResultsText(RunSweep(cfg)), a);
}

TEST(BuildRunSpace, VocabularyComesFromTrainingSplitOnly) {
  // Give every document a private token so any leak is visible.
  std::vector<Document> docs =
      GenerateSynthetic(SynthConfig{}).documents();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    docs[i].text += " private" + std::to_string(i);
  }
  const Corpus corpus(std::move(docs));
  ShiftParams params;
  params.q = 0.4;
  params.alpha_test = 2.0;
  params.train_size = 300;
  params.test_size = 100;
  params.seed = 5;
  const SplitIndices split =
      DrawSplitIndices(MakeShiftSetting(params), corpus);
  const FeatureSpace space =
      BuildRunSpace(corpus, split, FeatureKind::kUnigram, 10.0, nullptr);
  for (std::size_t i : split.train) {
    EXPECT_TRUE(space.IndexOf("private" + std::to_string(i)).has_value());
  }
  for (std::size_t i : split.test) {
    EXPECT_FALSE(space.IndexOf("private" + std::to_string(i)).has_value());
  }
  std::set<std::string> train_tokens;
  for (std::size_t i : split.train) {
    for (auto& t : Tokenize(corpus[i].text)) train_tokens.insert(t);
  }
  EXPECT_EQ(space.vocabulary(),
            std::vector<std::string>(train_tokens.begin(), train_tokens.end()));
}

// A small dense representation derived from token content, standing in for
// sentence embeddings.
EmbeddingTable HashedEmbeddings(const Corpus& corpus, std::size_t dim) {
  EmbeddingTable table;
  for (const auto& d : corpus.documents()) {
    std::vector<double> v(dim, 0.0);
    const auto tokens = Tokenize(d.text);
    for (const auto& t : tokens) {
      std::size_t h = 0;
      for (char c : t) h = h * 131 + static_cast<unsigned char>(c);
      v[h % dim] += 1.0 / static_cast<double>(tokens.size());
    }
    table.Insert(d.id, std::move(v));
  }
  return table;
}

TEST(RunSweep, EmbeddingRepresentation) {
  const Corpus corpus = GenerateSynthetic(SynthConfig{});
  const EmbeddingTable table = HashedEmbeddings(corpus, 16);
  const fs::path dir = ScratchDir("embedding");
  {
    std::ofstream out(dir / "emb.jsonl");
    WriteEmbeddings(table, out);
  }
  ExperimentConfig cfg = SmallConfig();
  cfg.representation = "embedding:" + (dir / "emb.jsonl").string();
  cfg.seeds = {0, 1};
  const SweepResult r = RunSweep(cfg);
  EXPECT_TRUE(r.failures.empty());
  ASSERT_EQ(r.records.size(), 4u);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.representation, "embedding");
    EXPECT_GT(rec.auprc, 0.0);
  }
}

TEST(RunSweep, IncompleteEmbeddingsRejectedUpFront) {
  const Corpus corpus = GenerateSynthetic(SynthConfig{});
  EmbeddingTable table;
  table.Insert(corpus[0].id, {1.0, 2.0});
  const fs::path dir = ScratchDir("incomplete");
  {
    std::ofstream out(dir / "emb.jsonl");
    WriteEmbeddings(table, out);
  }
  ExperimentConfig cfg = SmallConfig();
  cfg.representation = "embedding:" + (dir / "emb.jsonl").string();
  EXPECT_THROW(RunSweep(cfg), MissingEmbedding);
}

TEST(RunSweep, FailuresAreRecordedAndSkipped) {
  const Corpus corpus = GenerateSynthetic(SynthConfig{});
  const EmbeddingTable full = HashedEmbeddings(corpus, 4);
  // Drop a handful of documents so some splits hit a missing vector.
  EmbeddingTable partial;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i % 441 != 7) partial.Insert(corpus[i].id, full.Lookup(corpus[i].id));
  }
  ExperimentConfig cfg = SmallConfig();
  cfg.representation = "embedding:unused.jsonl";
  cfg.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const SweepResult r = RunSweep(cfg, corpus, &partial);
  EXPECT_FALSE(r.failures.empty());
  EXPECT_FALSE(r.records.empty());
  EXPECT_EQ(r.records.size() / cfg.modes.size() + r.failures.size(),
            cfg.seeds.size());
  std::set<std::uint64_t> failed;
  for (const auto& f : r.failures) {
    failed.insert(f.seed);
    EXPECT_NE(f.reason.find("embedding"), std::string::npos) << f.reason;
  }
  for (const auto& rec : r.records) EXPECT_FALSE(failed.count(rec.seed));
}

TEST(RunSweep, MatchedDistributionsGiveSimilarModels) {
  ExperimentConfig cfg;
  cfg.synthetic = SynthConfig{};
  cfg.q = GridAxis::List({0.3, 0.5, 0.6});
  cfg.alpha_test = GridAxis::List({0.4});
  cfg.threads = 4;
  const SweepResult r = RunSweep(cfg);
  ASSERT_EQ(r.aggregate.size(), 6u);
  std::map<double, std::map<ModelMode, double>> means;
  for (const auto& row : r.aggregate) means[row.q][row.mode] = row.mean;
  for (const auto& [q, m] : means) {
    EXPECT_LT(std::abs(m.at(ModelMode::kBackdoor) - m.at(ModelMode::kVanilla)),
              0.03)
        << "q " << q;
  }
}

TEST(ExperimentConfig, FromJson) {
  const nlohmann::json j = {
      {"corpus", "data/pool.jsonl"},
      {"representation", "embedding:emb.jsonl"},
      {"q", {0.3, 0.5}},
      {"alpha_test", {{"start", 0.5}, {"stop", 1.5}, {"step", 0.5}}},
      {"seeds", {1, 2}},
      {"v", 100},
      {"lambda", 0.25},
      {"modes", {"vanilla"}},
      {"output_dir", "out"},
      {"threads", 3}};
  const ExperimentConfig cfg = ExperimentConfigFromJson(j, "/base");
  EXPECT_EQ(cfg.corpus, fs::path("/base/data/pool.jsonl"));
  EXPECT_EQ(cfg.representation_kind(), FeatureKind::kEmbedding);
  EXPECT_EQ(cfg.embedding_path(), fs::path("/base/emb.jsonl"));
  EXPECT_EQ(cfg.q.values, (std::vector<double>{0.3, 0.5}));
  EXPECT_EQ(cfg.alpha_test.values, (std::vector<double>{0.5, 1.0, 1.5}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(cfg.v, 100.0);
  EXPECT_EQ(cfg.l2_strength, 0.25);
  EXPECT_EQ(cfg.modes, std::vector<ModelMode>{ModelMode::kVanilla});
  EXPECT_EQ(cfg.output_dir, fs::path("/base/out"));
  EXPECT_EQ(cfg.threads, 3u);
}

TEST(ExperimentConfig, Defaults) {
  const ExperimentConfig cfg = ExperimentConfigFromJson({{"corpus", "x"}});
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(cfg.grid().CandidateCount(), 3417u);
  EXPECT_EQ(cfg.train_size, 2000u);
  EXPECT_EQ(cfg.test_size, 500u);
  EXPECT_EQ(cfg.a0_train, 0.5);
  EXPECT_EQ(cfg.a1_train, 0.2);
}

TEST(ExperimentConfig, ValidationErrors) {
  EXPECT_THROW(ExperimentConfigFromJson({{"corpus", "x"}, {"seeds", {1, 1}}}),
               ConfigError);
  EXPECT_THROW(
      ExperimentConfigFromJson({{"corpus", "x"}, {"q", nlohmann::json::array()}}),
      ConfigError);
  EXPECT_THROW(
      ExperimentConfigFromJson({{"corpus", "x"}, {"representation", "bag"}}),
      ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson({{"corpus", "x"}, {"v", "ten"}}),
               ConfigError);
}

}  // namespace
}  // namespace provshift
