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
#ifndef PROVSHIFT_CORPUS_H_
#define PROVSHIFT_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace provshift {

// Source 0 and 1 carry these display names in tables and plots.
inline constexpr std::array<std::string_view, 2> kSourceNames = {"UW",
                                                                  "MIMIC"};

struct Document {
  std::string id;
  std::string text;
  int label = 0;   // 1 = positive class
  int source = 0;  // 0 = UW, 1 = MIMIC

  bool operator==(const Document&) const = default;
};

// Document counts for each (source, label) cell of a binary/binary pool.
class CellCounts {
 public:
  CellCounts() = default;
  // Cells given as (z=0,y=0), (z=0,y=1), (z=1,y=0), (z=1,y=1).
  CellCounts(std::size_t neg0, std::size_t pos0, std::size_t neg1,
             std::size_t pos1)
      : cells_{neg0, pos0, neg1, pos1} {}

  std::size_t& at(int source, int label) { return cells_[Slot(source, label)]; }
  std::size_t at(int source, int label) const {
    return cells_[Slot(source, label)];
  }
  std::size_t SourceTotal(int source) const {
    return at(source, 0) + at(source, 1);
  }
  std::size_t Total() const { return SourceTotal(0) + SourceTotal(1); }

  bool operator==(const CellCounts&) const = default;

 private:
  static std::size_t Slot(int source, int label);
  std::array<std::size_t, 4> cells_{};
};

// Pool statistics of the reference multi-site clinical corpus:
// UW 2528 notes (1040 positive), MIMIC 1877 notes (371 positive).
CellCounts ReferencePoolCounts();

// An immutable, validated sequence of documents.
class Corpus {
 public:
  Corpus() = default;
  // Throws IntegrityError on duplicate ids or labels/sources outside {0,1}.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const CellCounts& pool_counts() const { return pool_counts_; }

  // Index of the document with this id, or npos.
  std::size_t Find(std::string_view id) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Document> documents_;
  CellCounts pool_counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

CellCounts PoolCounts(const Corpus& corpus);

Corpus ParseCorpus(std::istream& in);
Corpus LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(const Corpus& corpus, std::ostream& out);
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path);

// One JSONL line, without the trailing newline.
std::string DocumentToJsonLine(const Document& doc);

// Parameters of the synthetic stand-in corpus. Three disjoint word classes:
// shared noise words, per-source style cues, and label cues that only
// positive documents carry.
struct SynthConfig {
  CellCounts n_per_cell = ReferencePoolCounts();
  std::size_t noise_vocab_size = 2000;
  std::size_t source_cue_vocab_size = 50;  // per source
  std::size_t label_cue_vocab_size = 20;
  // Probability that a positive document carries label-cue tokens.
  double cue_strength = 0.85;
  // Per token slot probability of drawing from the source's cue words.
  double style_strength = 0.1;
  std::size_t min_doc_length = 20;
  std::size_t max_doc_length = 60;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void Validate() const;
};

SynthConfig SynthConfigFromJson(const nlohmann::json& j);
nlohmann::json SynthConfigToJson(const SynthConfig& cfg);

// Vocabulary naming used by the generator.
std::string NoiseWord(std::size_t i);
std::string SourceCueWord(int source, std::size_t i);
std::string LabelCueWord(std::size_t i);

// Deterministic in cfg. Documents are emitted cell by cell in the order
// (0,0), (0,1), (1,0), (1,1).
Corpus GenerateSynthetic(const SynthConfig& cfg);

}  // namespace provshift

#endif  // PROVSHIFT_CORPUS_H_
