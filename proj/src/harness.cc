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

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <thread>

#include "provshift/errors.h"

namespace provshift {

void ExperimentConfig::Validate() const {
  if (q.values.empty() || alpha_test.values.empty()) {
    throw ConfigError("q and alpha_test grids must be nonempty");
  }
  if (seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
      seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (modes.empty()) throw ConfigError("modes must be nonempty");
  if (train_size == 0 || test_size == 0) {
    throw ConfigError("train_size and test_size must be positive");
  }
  if (!synthetic && corpus.empty()) {
    throw ConfigError("config needs a corpus path or a synthetic section");
  }
  (void)representation_kind();
  if (threads == 0) throw ConfigError("threads must be positive");
}

FeatureKind ExperimentConfig::representation_kind() const {
  if (representation == "unigram") return FeatureKind::kUnigram;
  if (representation.rfind("embedding:", 0) == 0 &&
      representation.size() > 10) {
    return FeatureKind::kEmbedding;
  }
  throw ConfigError("representation must be 'unigram' or 'embedding:<file>'");
}

std::filesystem::path ExperimentConfig::embedding_path() const {
  if (representation_kind() != FeatureKind::kEmbedding) return {};
  return representation.substr(10);
}

GridSpec ExperimentConfig::grid() const {
  GridSpec g;
  g.a0_train = a0_train;
  g.a1_train = a1_train;
  g.train_size = train_size;
  g.test_size = test_size;
  g.q = q;
  g.alpha_test = alpha_test;
  return g;
}

namespace {

std::filesystem::path Resolve(const std::filesystem::path& p,
                              const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j,
                                          const std::filesystem::path& base) {
  ExperimentConfig cfg;
  try {
    if (j.contains("corpus")) {
      cfg.corpus = Resolve(j.at("corpus").get<std::string>(), base);
    }
    if (j.contains("synthetic")) {
      cfg.synthetic = SynthConfigFromJson(j.at("synthetic"));
    }
    cfg.representation = j.value("representation", cfg.representation);
    if (cfg.representation_kind() == FeatureKind::kEmbedding) {
      cfg.representation =
          "embedding:" + Resolve(cfg.embedding_path(), base).string();
    }
    cfg.a0_train = j.value("a0_train", cfg.a0_train);
    cfg.a1_train = j.value("a1_train", cfg.a1_train);
    cfg.train_size = j.value("train_size", cfg.train_size);
    cfg.test_size = j.value("test_size", cfg.test_size);
    if (j.contains("q")) cfg.q = GridAxisFromJson(j.at("q"));
    if (j.contains("alpha_test")) {
      cfg.alpha_test = GridAxisFromJson(j.at("alpha_test"));
    }
    if (j.contains("seeds")) {
      cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    }
    cfg.global_seed = j.value("global_seed", cfg.global_seed);
    cfg.v = j.value("v", cfg.v);
    cfg.l2_strength = j.value("l2", j.value("lambda", cfg.l2_strength));
    if (j.contains("modes")) {
      cfg.modes.clear();
      for (const auto& m : j.at("modes")) {
        cfg.modes.push_back(ParseModelMode(m.get<std::string>()));
      }
    }
    if (j.contains("output_dir")) {
      cfg.output_dir = Resolve(j.at("output_dir").get<std::string>(), base);
    }
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  return ExperimentConfigFromJson(j, path.parent_path());
}

FeatureSpace BuildRunSpace(const Corpus& corpus, const SplitIndices& split,
                           FeatureKind kind, double v,
                           const EmbeddingTable* table) {
  if (kind == FeatureKind::kUnigram) return BuildVocab(corpus, split.train, v);
  if (table == nullptr) throw ConfigError("embedding table required");
  return table->MakeSpace(v);
}

std::vector<EvalRecord> RunSetting(const ShiftSetting& setting,
                                   std::uint64_t repeat_seed,
                                   const Corpus& corpus,
                                   const EmbeddingTable* table,
                                   const ExperimentConfig& cfg) {
  ShiftSetting seeded = setting;
  seeded.params.seed = SplitSeed(cfg.global_seed, setting.params.q,
                                 setting.params.alpha_test, repeat_seed);
  const SplitIndices split = DrawSplitIndices(seeded, corpus);
  const FeatureKind kind = cfg.representation_kind();
  const FeatureSpace space = BuildRunSpace(corpus, split, kind, cfg.v, table);

  std::vector<FeatureVector> train_x;
  std::vector<int> train_y, train_z;
  train_x.reserve(split.train.size());
  for (std::size_t i : split.train) {
    train_x.push_back(Vectorize(corpus[i], space, table));
    train_y.push_back(corpus[i].label);
    train_z.push_back(corpus[i].source);
  }
  std::vector<FeatureVector> test_x;
  std::vector<int> test_y;
  test_x.reserve(split.test.size());
  for (std::size_t i : split.test) {
    test_x.push_back(Vectorize(corpus[i], space, table));
    test_y.push_back(corpus[i].label);
  }

  std::vector<EvalRecord> out;
  for (ModelMode mode : cfg.modes) {
    ModelConfig mc;
    mc.v = cfg.v;
    mc.l2_strength = cfg.l2_strength;
    mc.mode = mode;
    const TrainedModel model = Train(train_x, train_y, train_z, space, mc);
    std::vector<double> scores;
    scores.reserve(test_x.size());
    for (const auto& x : test_x) scores.push_back(Predict(model, x));
    EvalRecord r;
    r.q = setting.params.q;
    r.alpha_test = setting.params.alpha_test;
    r.mode = mode;
    r.representation = std::string(FeatureKindName(kind));
    r.v = cfg.v;
    r.seed = repeat_seed;
    r.auprc = Auprc(scores, test_y);
    out.push_back(std::move(r));
  }
  return out;
}

SweepResult RunSweep(const ExperimentConfig& cfg, const Corpus& corpus,
                     const EmbeddingTable* table) {
  cfg.Validate();
  SweepResult result;
  result.settings = EnumerateGrid(corpus.pool_counts(), cfg.grid());

  struct Task {
    const ShiftSetting* setting;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& s : result.settings) {
    for (std::uint64_t seed : cfg.seeds) tasks.push_back({&s, seed});
  }
  std::vector<std::vector<EvalRecord>> records(tasks.size());
  std::vector<std::optional<std::string>> errors(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        records[t] =
            RunSetting(*tasks[t].setting, tasks[t].seed, corpus, table, cfg);
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(cfg.threads, std::max<std::size_t>(tasks.size(), 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (errors[t]) {
      result.failures.push_back({tasks[t].setting->params.q,
                                 tasks[t].setting->params.alpha_test,
                                 tasks[t].seed, *errors[t]});
      continue;
    }
    for (auto& r : records[t]) result.records.push_back(std::move(r));
  }
  SortRecords(result.records);
  result.aggregate = Aggregate(result.records);
  return result;
}

SweepResult RunSweep(const ExperimentConfig& cfg) {
  cfg.Validate();
  const Corpus corpus = cfg.synthetic ? GenerateSynthetic(*cfg.synthetic)
                                      : LoadCorpus(cfg.corpus);
  std::optional<EmbeddingTable> table;
  if (cfg.representation_kind() == FeatureKind::kEmbedding) {
    table = EmbeddingTable::Load(cfg.embedding_path());
    for (const auto& d : corpus.documents()) {
      if (!table->Contains(d.id)) {
        throw MissingEmbedding("embedding file lacks document '" + d.id + "'");
      }
    }
  }
  SweepResult result = RunSweep(cfg, corpus, table ? &*table : nullptr);
  if (!cfg.output_dir.empty()) WriteSweepOutputs(result, cfg.output_dir);
  return result;
}

namespace {

std::string CsvField(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::ofstream OpenOut(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

}  // namespace

void WriteSweepOutputs(const SweepResult& result,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = OpenOut(dir / "results.csv");
    WriteResultsCsv(result.records, out);
  }
  {
    auto out = OpenOut(dir / "aggregate.csv");
    WriteAggregateCsv(result.aggregate, out);
  }
  {
    auto out = OpenOut(dir / "failures.csv");
    out << "q,alpha_test,seed,reason\n";
    for (const auto& f : result.failures) {
      out << FormatDouble(f.q) << ',' << FormatDouble(f.alpha_test) << ','
          << f.seed << ',' << CsvField(f.reason) << '\n';
    }
  }
  {
    auto out = OpenOut(dir / "settings.json");
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : result.settings) arr.push_back(ShiftSettingToJson(s));
    out << arr.dump(2) << '\n';
  }
}

}  // namespace provshift
