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

// Command-line front end: corpus generation, feasibility enumeration, split
// sampling, training, prediction, sweeps and curve data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "provshift/corpus.h"
#include "provshift/errors.h"
#include "provshift/featurize.h"
#include "provshift/harness.h"
#include "provshift/metrics.h"
#include "provshift/model.h"
#include "provshift/plots.h"
#include "provshift/shift_sampler.h"

namespace provshift {
namespace {

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

int Generate(const std::string& config_path, const std::string& out_path) {
  const SynthConfig cfg = config_path.empty()
                              ? SynthConfig{}
                              : SynthConfigFromJson(ReadJsonFile(config_path));
  const Corpus corpus = GenerateSynthetic(cfg);
  WriteCorpus(corpus, std::filesystem::path(out_path));
  const CellCounts& c = corpus.pool_counts();
  std::printf("wrote %zu documents to %s (UW %zu/%zu pos, MIMIC %zu/%zu pos)\n",
              corpus.size(), out_path.c_str(), c.at(0, 1), c.SourceTotal(0),
              c.at(1, 1), c.SourceTotal(1));
  return 0;
}

int Feasibility(const std::string& pool_path, bool reference_pool,
                const std::string& grid_path, const std::string& out_path) {
  const CellCounts pool =
      reference_pool ? ReferencePoolCounts() : LoadCorpus(pool_path).pool_counts();
  const GridSpec grid = grid_path.empty() ? ReferenceGrid()
                                          : GridSpecFromJson(ReadJsonFile(grid_path));
  const auto settings = EnumerateGrid(pool, grid);
  std::printf("%zu feasible settings of %zu candidates\n", settings.size(),
              grid.CandidateCount());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : settings) arr.push_back(ShiftSettingToJson(s));
  auto out = OpenOut(out_path);
  out << arr.dump(2) << '\n';
  return 0;
}

int Sample(const std::string& setting_path, const std::string& corpus_path,
           const std::string& train_path, const std::string& test_path) {
  const ShiftSetting setting = ShiftSettingFromJson(ReadJsonFile(setting_path));
  const Corpus corpus = LoadCorpus(corpus_path);
  if (!CheckFeasible(setting, corpus.pool_counts())) {
    throw InfeasiblePool("setting cannot be drawn from this corpus");
  }
  const SplitIndices split = DrawSplitIndices(setting, corpus);
  auto write = [&](const std::vector<std::size_t>& idx, const std::string& p) {
    auto out = OpenOut(p);
    for (std::size_t i : idx) out << DocumentToJsonLine(corpus[i]) << '\n';
  };
  write(split.train, train_path);
  write(split.test, test_path);
  std::printf("train %zu documents -> %s, test %zu documents -> %s\n",
              split.train.size(), train_path.c_str(), split.test.size(),
              test_path.c_str());
  return 0;
}

struct Features {
  FeatureKind kind = FeatureKind::kUnigram;
  std::optional<EmbeddingTable> table;
};

Features ParseFeatures(const std::string& spec) {
  Features f;
  if (spec == "unigram") return f;
  if (spec.rfind("embedding:", 0) == 0 && spec.size() > 10) {
    f.kind = FeatureKind::kEmbedding;
    f.table = EmbeddingTable::Load(spec.substr(10));
    return f;
  }
  throw ConfigError("--features must be 'unigram' or 'embedding:<file>'");
}

int TrainCommand(const std::string& train_path, const std::string& features,
                 const std::string& mode, double v, double l2,
                 const std::string& out_path) {
  const Corpus corpus = LoadCorpus(train_path);
  Features f = ParseFeatures(features);
  const EmbeddingTable* table = f.table ? &*f.table : nullptr;
  const FeatureSpace space = f.kind == FeatureKind::kUnigram
                                 ? BuildVocab(corpus.documents(), v)
                                 : table->MakeSpace(v);
  std::vector<FeatureVector> xs;
  std::vector<int> ys, zs;
  for (const auto& d : corpus.documents()) {
    xs.push_back(Vectorize(d, space, table));
    ys.push_back(d.label);
    zs.push_back(d.source);
  }
  ModelConfig mc;
  mc.v = v;
  mc.l2_strength = l2;
  mc.mode = ParseModelMode(mode);
  const TrainedModel model = Train(xs, ys, zs, space, mc);
  SaveModel(model, out_path);
  std::printf("%s model on %zu documents, %zu features: %d iterations, "
              "|grad|_inf=%.3g%s -> %s\n",
              std::string(ModelModeName(model.mode)).c_str(), corpus.size(),
              space.dim(), model.fit.iterations, model.fit.gradient_inf_norm,
              model.fit.converged ? "" : " (not converged)", out_path.c_str());
  return 0;
}

int PredictCommand(const std::string& model_path, const std::string& corpus_path,
                   const std::string& embeddings, const std::string& out_path) {
  const TrainedModel model = LoadModel(model_path);
  const Corpus corpus = LoadCorpus(corpus_path);
  std::optional<EmbeddingTable> table;
  if (model.space.kind() == FeatureKind::kEmbedding) {
    if (embeddings.empty()) {
      throw ConfigError("embedding model needs --embeddings <file>");
    }
    table = EmbeddingTable::Load(embeddings);
  }
  std::vector<double> scores;
  std::vector<int> labels;
  auto out = OpenOut(out_path);
  out << "id,label,source,score\n";
  for (const auto& d : corpus.documents()) {
    const double s =
        Predict(model, Vectorize(d, model.space, table ? &*table : nullptr));
    scores.push_back(s);
    labels.push_back(d.label);
    out << d.id << ',' << d.label << ',' << d.source << ',' << FormatDouble(s)
        << '\n';
  }
  try {
    std::printf("AUPRC %.6f over %zu documents\n", Auprc(scores, labels),
                corpus.size());
  } catch (const UndefinedMetric&) {
    std::printf("AUPRC undefined (no positive labels)\n");
  }
  return 0;
}

int Sweep(const std::string& config_path, unsigned threads) {
  ExperimentConfig cfg = LoadExperimentConfig(config_path);
  if (threads > 0) cfg.threads = threads;
  const SweepResult result = RunSweep(cfg);
  std::printf("%zu feasible settings, %zu records, %zu failures\n",
              result.settings.size(), result.records.size(),
              result.failures.size());
  if (!cfg.output_dir.empty()) {
    std::printf("outputs in %s\n", cfg.output_dir.string().c_str());
  } else {
    WriteAggregateCsv(result.aggregate, std::cout);
  }
  for (const auto& f : result.failures) {
    std::fprintf(stderr, "failed q=%s alpha_test=%s seed=%llu: %s\n",
                 FormatDouble(f.q).c_str(), FormatDouble(f.alpha_test).c_str(),
                 static_cast<unsigned long long>(f.seed), f.reason.c_str());
  }
  return result.failures.empty() ? 0 : 3;
}

int PlotData(const std::string& results_path, const std::string& out_dir,
             double alpha_train, std::optional<double> zero_floor) {
  std::ifstream in(results_path);
  if (!in) throw Error("cannot open " + results_path);
  std::string header;
  std::getline(in, header);
  in.seekg(0);
  // Raw per-seed results are aggregated on the fly.
  std::vector<AggregateRow> rows =
      header.find(",seed,") != std::string::npos
          ? Aggregate(ReadResultsCsv(in))
          : ReadAggregateCsv(in);
  CurveOptions options;
  options.alpha_train = alpha_train;
  options.zero_floor = zero_floor;
  const auto files = EmitCurves(rows, out_dir, options);
  std::printf("wrote %zu files to %s\n", files.size(), out_dir.c_str());
  return 0;
}

}  // namespace
}  // namespace provshift

int main(int argc, char** argv) {
  using namespace provshift;
  CLI::App app{"Backdoor-adjusted text classification under confounding shift"};
  app.require_subcommand(1);

  std::string gen_config, gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus");
  gen->add_option("--config", gen_config, "SynthConfig JSON (defaults if omitted)");
  gen->add_option("--out", gen_out, "Output JSONL")->required();

  std::string feas_pool, feas_grid, feas_out = "feasible_settings.json";
  bool feas_reference = false;
  auto* feas = app.add_subcommand("feasibility", "Enumerate feasible shift settings");
  auto* pool_opt = feas->add_option("--pool", feas_pool, "Corpus whose pool counts bound the draws");
  auto* ref_opt = feas->add_flag("--reference-pool", feas_reference,
                                 "Use the reference pool counts (UW 1040/2528, MIMIC 371/1877)");
  pool_opt->excludes(ref_opt);
  feas->add_option("--grid", feas_grid, "Grid JSON (reference grid if omitted)");
  feas->add_option("--out", feas_out, "Settings JSON output");

  std::string smp_setting, smp_corpus, smp_train, smp_test;
  auto* smp = app.add_subcommand("sample", "Draw one train/test split");
  smp->add_option("--setting", smp_setting)->required();
  smp->add_option("--corpus", smp_corpus)->required();
  smp->add_option("--out-train", smp_train)->required();
  smp->add_option("--out-test", smp_test)->required();

  std::string tr_train, tr_features = "unigram", tr_mode = "backdoor", tr_out;
  double tr_v = 10.0, tr_l2 = ModelConfig{}.l2_strength;
  auto* tr = app.add_subcommand("train", "Fit a backdoor or vanilla model");
  tr->add_option("--train", tr_train)->required();
  tr->add_option("--features", tr_features, "unigram | embedding:<file>");
  tr->add_option("--mode", tr_mode, "backdoor | vanilla");
  tr->add_option("--v", tr_v, "Confounder scale");
  tr->add_option("--l2", tr_l2, "L2 strength on the mean loss");
  tr->add_option("--out", tr_out)->required();

  std::string pr_model, pr_corpus, pr_emb, pr_out;
  auto* pr = app.add_subcommand("predict", "Score a corpus with a saved model");
  pr->add_option("--model", pr_model)->required();
  pr->add_option("--corpus", pr_corpus)->required();
  pr->add_option("--embeddings", pr_emb, "Embedding JSONL for embedding models");
  pr->add_option("--out", pr_out, "Scores CSV")->required();

  std::string sw_config;
  unsigned sw_threads = 0;
  auto* sw = app.add_subcommand("sweep", "Run the shift sweep");
  sw->add_option("--config", sw_config)->required();
  sw->add_option("--threads", sw_threads, "Override the worker count");

  std::string pd_results, pd_out;
  double pd_alpha_train = 0.4;
  std::optional<double> pd_floor;
  auto* pd = app.add_subcommand("plotdata", "Per-q curve data and SVG charts");
  pd->add_option("--results", pd_results, "results.csv or aggregate.csv")->required();
  pd->add_option("--out", pd_out)->required();
  pd->add_option("--alpha-train", pd_alpha_train);
  pd->add_option("--zero-floor", pd_floor, "x position for alpha_test = 0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return Generate(gen_config, gen_out);
    if (*feas) {
      if (feas_pool.empty() && !feas_reference) {
        throw ConfigError("feasibility needs --pool <corpus> or --reference-pool");
      }
      return Feasibility(feas_pool, feas_reference, feas_grid, feas_out);
    }
    if (*smp) return Sample(smp_setting, smp_corpus, smp_train, smp_test);
    if (*tr) return TrainCommand(tr_train, tr_features, tr_mode, tr_v, tr_l2, tr_out);
    if (*pr) return PredictCommand(pr_model, pr_corpus, pr_emb, pr_out);
    if (*sw) return Sweep(sw_config, sw_threads);
    if (*pd) return PlotData(pd_results, pd_out, pd_alpha_train, pd_floor);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
