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
#include "provshift/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "provshift/errors.h"
#include "provshift/random.h"

namespace provshift {

std::size_t CellCounts::Slot(int source, int label) {
  if ((source != 0 && source != 1) || (label != 0 && label != 1)) {
    throw DomainError("cell (" + std::to_string(source) + "," +
                      std::to_string(label) + ") out of range");
  }
  return static_cast<std::size_t>(source * 2 + label);
}

CellCounts ReferencePoolCounts() {
  return CellCounts(/*neg0=*/2528 - 1040, /*pos0=*/1040,
                    /*neg1=*/1877 - 371, /*pos1=*/371);
}

Corpus::Corpus(std::vector<Document> documents)
    : documents_(std::move(documents)) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& d = documents_[i];
    if (d.label != 0 && d.label != 1) {
      throw IntegrityError("document '" + d.id + "': label " +
                           std::to_string(d.label) + " not in {0,1}");
    }
    if (d.source != 0 && d.source != 1) {
      throw IntegrityError("document '" + d.id + "': source " +
                           std::to_string(d.source) + " not in {0,1}");
    }
    if (!index_.emplace(d.id, i).second) {
      throw IntegrityError("duplicate document id '" + d.id + "'");
    }
    ++pool_counts_.at(d.source, d.label);
  }
}

std::size_t Corpus::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? npos : it->second;
}

CellCounts PoolCounts(const Corpus& corpus) {
  CellCounts counts;
  for (const Document& d : corpus.documents()) ++counts.at(d.source, d.label);
  return counts;
}

namespace {

int ReadBinaryField(const nlohmann::json& obj, const char* key,
                    std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(line, std::string("missing field '") + key + "'");
  }
  if (!it->is_number_integer()) {
    throw ParseError(line, std::string("field '") + key +
                               "' must be an integer");
  }
  const auto value = it->get<std::int64_t>();
  if (value != 0 && value != 1) {
    throw IntegrityError("line " + std::to_string(line) + ": " + key + " " +
                         std::to_string(value) + " not in {0,1}");
  }
  return static_cast<int>(value);
}

std::string ReadStringField(const nlohmann::json& obj, const char* key,
                            std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(line, std::string("field '") + key +
                               "' missing or not a string");
  }
  return it->get<std::string>();
}

bool IsBlank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Corpus ParseCorpus(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
    Document d;
    d.id = ReadStringField(obj, "id", line_no);
    d.text = ReadStringField(obj, "text", line_no);
    d.label = ReadBinaryField(obj, "label", line_no);
    d.source = ReadBinaryField(obj, "source", line_no);
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs));
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return ParseCorpus(in);
}

std::string DocumentToJsonLine(const Document& doc) {
  nlohmann::ordered_json obj;
  obj["id"] = doc.id;
  obj["text"] = doc.text;
  obj["label"] = doc.label;
  obj["source"] = doc.source;
  return obj.dump();
}

void WriteCorpus(const Corpus& corpus, std::ostream& out) {
  for (const Document& d : corpus.documents()) {
    out << DocumentToJsonLine(d) << '\n';
  }
}

void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path.string());
  WriteCorpus(corpus, out);
}

void SynthConfig::Validate() const {
  auto check_prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string(name) + " must lie in [0,1]");
    }
  };
  check_prob(cue_strength, "cue_strength");
  check_prob(style_strength, "style_strength");
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      if (n_per_cell.at(z, y) == 0) {
        throw ConfigError("n_per_cell entries must be positive");
      }
    }
  }
  if (noise_vocab_size == 0 || source_cue_vocab_size == 0 ||
      label_cue_vocab_size == 0) {
    throw ConfigError("vocabulary sizes must be positive");
  }
  if (min_doc_length == 0 || min_doc_length > max_doc_length) {
    throw ConfigError("doc_length_range must satisfy 1 <= min <= max");
  }
}

SynthConfig SynthConfigFromJson(const nlohmann::json& j) {
  SynthConfig cfg;
  try {
    if (j.contains("n_per_cell")) {
      const auto& n = j.at("n_per_cell");
      // {"0,0": n, "0,1": n, "1,0": n, "1,1": n}
      for (int z = 0; z < 2; ++z) {
        for (int y = 0; y < 2; ++y) {
          const std::string key = std::to_string(z) + "," + std::to_string(y);
          if (n.contains(key)) {
            const auto v = n.at(key).get<std::int64_t>();
            if (v <= 0) throw ConfigError("n_per_cell entries must be positive");
            cfg.n_per_cell.at(z, y) = static_cast<std::size_t>(v);
          }
        }
      }
    }
    cfg.noise_vocab_size = j.value("noise_vocab_size", cfg.noise_vocab_size);
    cfg.source_cue_vocab_size =
        j.value("source_cue_vocab_size", cfg.source_cue_vocab_size);
    cfg.label_cue_vocab_size =
        j.value("label_cue_vocab_size", cfg.label_cue_vocab_size);
    cfg.cue_strength = j.value("cue_strength", cfg.cue_strength);
    cfg.style_strength = j.value("style_strength", cfg.style_strength);
    if (j.contains("doc_length_range")) {
      const auto& r = j.at("doc_length_range");
      if (!r.is_array() || r.size() != 2) {
        throw ConfigError("doc_length_range must be [min, max]");
      }
      cfg.min_doc_length = r[0].get<std::size_t>();
      cfg.max_doc_length = r[1].get<std::size_t>();
    }
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

nlohmann::json SynthConfigToJson(const SynthConfig& cfg) {
  nlohmann::json n;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      n[std::to_string(z) + "," + std::to_string(y)] = cfg.n_per_cell.at(z, y);
    }
  }
  return {{"n_per_cell", n},
          {"noise_vocab_size", cfg.noise_vocab_size},
          {"source_cue_vocab_size", cfg.source_cue_vocab_size},
          {"label_cue_vocab_size", cfg.label_cue_vocab_size},
          {"cue_strength", cfg.cue_strength},
          {"style_strength", cfg.style_strength},
          {"doc_length_range", {cfg.min_doc_length, cfg.max_doc_length}},
          {"seed", cfg.seed}};
}

std::string NoiseWord(std::size_t i) { return "w" + std::to_string(i); }

std::string SourceCueWord(int source, std::size_t i) {
  return (source == 0 ? "uwstyle" : "mimicstyle") + std::to_string(i);
}

std::string LabelCueWord(std::size_t i) { return "cue" + std::to_string(i); }

Corpus GenerateSynthetic(const SynthConfig& cfg) {
  cfg.Validate();
  Rng rng(cfg.seed);
  std::vector<Document> docs;
  docs.reserve(cfg.n_per_cell.Total());
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      for (std::size_t k = 0; k < cfg.n_per_cell.at(z, y); ++k) {
        const auto length = static_cast<std::size_t>(
            rng.Between(static_cast<std::int64_t>(cfg.min_doc_length),
                        static_cast<std::int64_t>(cfg.max_doc_length)));
        std::vector<std::string> tokens;
        tokens.reserve(length + 3);
        for (std::size_t t = 0; t < length; ++t) {
          if (rng.Bernoulli(cfg.style_strength)) {
            tokens.push_back(
                SourceCueWord(z, rng.Index(cfg.source_cue_vocab_size)));
          } else {
            tokens.push_back(NoiseWord(rng.Index(cfg.noise_vocab_size)));
          }
        }
        if (y == 1 && rng.Bernoulli(cfg.cue_strength)) {
          const auto n_cues = rng.Between(1, 3);
          for (std::int64_t c = 0; c < n_cues; ++c) {
            const auto pos = rng.Index(tokens.size() + 1);
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                          LabelCueWord(rng.Index(cfg.label_cue_vocab_size)));
          }
        }
        std::ostringstream text;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          if (t) text << ' ';
          text << tokens[t];
        }
        Document d;
        d.id = "syn-" + std::to_string(z) + "-" + std::to_string(y) + "-" +
               std::to_string(k);
        d.text = text.str();
        d.label = y;
        d.source = z;
        docs.push_back(std::move(d));
      }
    }
  }
  return Corpus(std::move(docs));
}

}  // namespace provshift
