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

#ifndef PROVSHIFT_FEATURIZE_H_
#define PROVSHIFT_FEATURIZE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "provshift/corpus.h"

namespace provshift {

enum class FeatureKind { kUnigram, kEmbedding };

std::string_view FeatureKindName(FeatureKind kind);

// Lowercases ASCII letters and splits on every maximal run of characters
// that are not ASCII alphanumerics. Bytes >= 0x80 count as word characters
// so UTF-8 words stay intact. Empty tokens are dropped.
std::vector<std::string> Tokenize(std::string_view text);

// Text representation plus the confounder encoding rule: the confounder
// block has num_sources slots and the observed/hypothesized source gets v.
class FeatureSpace {
 public:
  FeatureSpace() = default;

  // vocabulary must be sorted and duplicate-free.
  static FeatureSpace Unigram(std::vector<std::string> vocabulary,
                              double v = 10.0, std::size_t num_sources = 2);
  static FeatureSpace Embedding(std::size_t dim, double v = 10.0,
                                std::size_t num_sources = 2);

  FeatureKind kind() const { return kind_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::size_t dim() const { return dim_; }
  double v() const { return v_; }
  std::size_t num_sources() const { return num_sources_; }
  std::size_t augmented_dim() const { return dim_ + num_sources_; }

  std::optional<std::uint32_t> IndexOf(std::string_view token) const;

  bool operator==(const FeatureSpace& other) const {
    return kind_ == other.kind_ && vocabulary_ == other.vocabulary_ &&
           dim_ == other.dim_ && v_ == other.v_ &&
           num_sources_ == other.num_sources_;
  }

 private:
  FeatureSpace(FeatureKind kind, std::vector<std::string> vocabulary,
               std::size_t dim, double v, std::size_t num_sources);

  FeatureKind kind_ = FeatureKind::kUnigram;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t dim_ = 0;
  double v_ = 10.0;
  std::size_t num_sources_ = 2;
};

// Base features (sparse binary or dense) with an optional confounder block
// appended after them.
class FeatureVector {
 public:
  FeatureVector() = default;

  // indices must be sorted, unique and < dim.
  static FeatureVector Binary(std::size_t dim,
                              std::vector<std::uint32_t> indices);
  static FeatureVector Dense(std::vector<double> values);

  bool is_sparse() const { return sparse_; }
  std::size_t dim() const { return dim_; }
  // Active coordinates of a sparse vector.
  const std::vector<std::uint32_t>& active() const { return active_; }
  // Values of a dense vector.
  const std::vector<double>& dense_values() const { return dense_; }
  double base(std::size_t i) const;

  bool augmented() const { return !confounder_.empty(); }
  const std::vector<double>& confounder_block() const { return confounder_; }
  std::size_t size() const { return dim_ + confounder_.size(); }

  // w.size() must equal size().
  double Dot(std::span<const double> w) const;
  // out[i] += scale * x[i] over base and confounder coordinates.
  void AddScaled(std::span<double> out, double scale) const;

  FeatureVector WithConfounder(std::vector<double> block) const;
  FeatureVector BaseOnly() const;

  bool operator==(const FeatureVector&) const = default;

 private:
  bool sparse_ = true;
  std::size_t dim_ = 0;
  std::vector<std::uint32_t> active_;
  std::vector<double> dense_;
  std::vector<double> confounder_;
};

// Vocabulary of every token that occurs in at least one of the documents.
// Throws ConfigError if the documents are empty or yield no tokens.
FeatureSpace BuildVocab(std::span<const Document> train_docs, double v = 10.0,
                        std::size_t num_sources = 2);
FeatureSpace BuildVocab(const Corpus& corpus,
                        std::span<const std::size_t> train_indices,
                        double v = 10.0, std::size_t num_sources = 2);

// Coordinate i is 1 iff vocabulary[i] occurs in the text. Out-of-vocabulary
// tokens are ignored.
FeatureVector VectorizeUnigram(std::string_view text,
                               const FeatureSpace& space);

// Document id -> dense vector, all of one dimensionality.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  // {"id": string, "vector": [number, ...]} per line. Throws ParseError on
  // malformed lines and FormatError on inconsistent dimensions, empty
  // vectors or duplicate ids.
  static EmbeddingTable Parse(std::istream& in);
  static EmbeddingTable Load(const std::filesystem::path& path);

  void Insert(std::string id, std::vector<double> vector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool Contains(std::string_view id) const;
  // Throws MissingEmbedding.
  const std::vector<double>& Lookup(std::string_view id) const;
  // Ids in file order.
  const std::vector<std::string>& ids() const { return ids_; }

  FeatureSpace MakeSpace(double v = 10.0, std::size_t num_sources = 2) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

void WriteEmbeddings(const EmbeddingTable& table, std::ostream& out);

FeatureVector VectorizeEmbedding(const Document& doc,
                                 const EmbeddingTable& table,
                                 const FeatureSpace& space);

// Dispatches on space.kind(); table is required for embedding spaces.
FeatureVector Vectorize(const Document& doc, const FeatureSpace& space,
                        const EmbeddingTable* table);

// Returns vec with its confounder block set to v at position c and 0
// elsewhere. Throws DomainError unless c < space.num_sources().
FeatureVector Augment(const FeatureVector& vec, std::size_t c,
                      const FeatureSpace& space);

}  // namespace provshift

#endif  // PROVSHIFT_FEATURIZE_H_
