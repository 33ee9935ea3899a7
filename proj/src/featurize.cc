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

#include "provshift/featurize.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <utility>

#include "json.hpp"
#include "provshift/errors.h"

namespace provshift {

std::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kUnigram ? "unigram" : "embedding";
}

namespace {

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsWordByte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

FeatureSpace::FeatureSpace(FeatureKind kind,
                           std::vector<std::string> vocabulary,
                           std::size_t dim, double v, std::size_t num_sources)
    : kind_(kind),
      vocabulary_(std::move(vocabulary)),
      dim_(dim),
      v_(v),
      num_sources_(num_sources) {
  if (!(v_ > 0.0) || !std::isfinite(v_)) {
    throw ConfigError("confounder scale v must be positive");
  }
  if (num_sources_ == 0) throw ConfigError("num_sources must be positive");
  if (dim_ == 0) throw ConfigError("feature dimension must be positive");
}

FeatureSpace FeatureSpace::Unigram(std::vector<std::string> vocabulary,
                                   double v, std::size_t num_sources) {
  if (!std::is_sorted(vocabulary.begin(), vocabulary.end()) ||
      std::adjacent_find(vocabulary.begin(), vocabulary.end()) !=
          vocabulary.end()) {
    throw ConfigError("vocabulary must be sorted and free of duplicates");
  }
  if (vocabulary.empty()) throw ConfigError("empty vocabulary");
  const std::size_t dim = vocabulary.size();
  FeatureSpace space(FeatureKind::kUnigram, std::move(vocabulary), dim, v,
                     num_sources);
  space.index_.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    space.index_.emplace(space.vocabulary_[i], static_cast<std::uint32_t>(i));
  }
  return space;
}

FeatureSpace FeatureSpace::Embedding(std::size_t dim, double v,
                                     std::size_t num_sources) {
  return FeatureSpace(FeatureKind::kEmbedding, {}, dim, v, num_sources);
}

std::optional<std::uint32_t> FeatureSpace::IndexOf(
    std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FeatureVector FeatureVector::Binary(std::size_t dim,
                                    std::vector<std::uint32_t> indices) {
  FeatureVector f;
  f.sparse_ = true;
  f.dim_ = dim;
  f.active_ = std::move(indices);
  return f;
}

FeatureVector FeatureVector::Dense(std::vector<double> values) {
  FeatureVector f;
  f.sparse_ = false;
  f.dim_ = values.size();
  f.dense_ = std::move(values);
  return f;
}

double FeatureVector::base(std::size_t i) const {
  if (!sparse_) return dense_[i];
  return std::binary_search(active_.begin(), active_.end(),
                            static_cast<std::uint32_t>(i))
             ? 1.0
             : 0.0;
}

double FeatureVector::Dot(std::span<const double> w) const {
  double s = 0.0;
  if (sparse_) {
    for (std::uint32_t i : active_) s += w[i];
  } else {
    for (std::size_t i = 0; i < dim_; ++i) s += dense_[i] * w[i];
  }
  for (std::size_t c = 0; c < confounder_.size(); ++c) {
    s += confounder_[c] * w[dim_ + c];
  }
  return s;
}

void FeatureVector::AddScaled(std::span<double> out, double scale) const {
  if (sparse_) {
    for (std::uint32_t i : active_) out[i] += scale;
  } else {
    for (std::size_t i = 0; i < dim_; ++i) out[i] += scale * dense_[i];
  }
  for (std::size_t c = 0; c < confounder_.size(); ++c) {
    out[dim_ + c] += scale * confounder_[c];
  }
}

FeatureVector FeatureVector::WithConfounder(std::vector<double> block) const {
  FeatureVector f = *this;
  f.confounder_ = std::move(block);
  return f;
}

FeatureVector FeatureVector::BaseOnly() const {
  FeatureVector f = *this;
  f.confounder_.clear();
  return f;
}

FeatureSpace BuildVocab(std::span<const Document> train_docs, double v,
                        std::size_t num_sources) {
  if (train_docs.empty()) throw ConfigError("empty training set");
  std::set<std::string> tokens;
  for (const Document& d : train_docs) {
    for (auto& t : Tokenize(d.text)) tokens.insert(std::move(t));
  }
  if (tokens.empty()) throw ConfigError("training documents yield no tokens");
  return FeatureSpace::Unigram({tokens.begin(), tokens.end()}, v, num_sources);
}

FeatureSpace BuildVocab(const Corpus& corpus,
                        std::span<const std::size_t> train_indices, double v,
                        std::size_t num_sources) {
  if (train_indices.empty()) throw ConfigError("empty training set");
  std::set<std::string> tokens;
  for (std::size_t i : train_indices) {
    for (auto& t : Tokenize(corpus[i].text)) tokens.insert(std::move(t));
  }
  if (tokens.empty()) throw ConfigError("training documents yield no tokens");
  return FeatureSpace::Unigram({tokens.begin(), tokens.end()}, v, num_sources);
}

FeatureVector VectorizeUnigram(std::string_view text,
                               const FeatureSpace& space) {
  if (space.kind() != FeatureKind::kUnigram) {
    throw ConfigError("VectorizeUnigram requires a unigram feature space");
  }
  std::vector<std::uint32_t> active;
  for (const auto& t : Tokenize(text)) {
    if (auto idx = space.IndexOf(t)) active.push_back(*idx);
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  return FeatureVector::Binary(space.dim(), std::move(active));
}

EmbeddingTable EmbeddingTable::Parse(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("vector") || !obj["vector"].is_array()) {
      throw ParseError(line_no, "expected {\"id\": string, \"vector\": [...]}");
    }
    std::vector<double> vec;
    vec.reserve(obj["vector"].size());
    for (const auto& x : obj["vector"]) {
      if (!x.is_number()) throw ParseError(line_no, "non-numeric vector entry");
      vec.push_back(x.get<double>());
    }
    try {
      table.Insert(obj["id"].get<std::string>(), std::move(vec));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

EmbeddingTable EmbeddingTable::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());
  return Parse(in);
}

void EmbeddingTable::Insert(std::string id, std::vector<double> vector) {
  if (vector.empty()) throw FormatError("empty embedding vector");
  if (dim_ == 0) {
    dim_ = vector.size();
  } else if (vector.size() != dim_) {
    throw FormatError("embedding for '" + id + "' has dimension " +
                      std::to_string(vector.size()) + ", expected " +
                      std::to_string(dim_));
  }
  if (vectors_.contains(id)) {
    throw FormatError("duplicate embedding id '" + id + "'");
  }
  ids_.push_back(id);
  vectors_.emplace(std::move(id), std::move(vector));
}

bool EmbeddingTable::Contains(std::string_view id) const {
  return vectors_.contains(std::string(id));
}

const std::vector<double>& EmbeddingTable::Lookup(std::string_view id) const {
  auto it = vectors_.find(std::string(id));
  if (it == vectors_.end()) {
    throw MissingEmbedding("no embedding for document '" + std::string(id) +
                           "'");
  }
  return it->second;
}

FeatureSpace EmbeddingTable::MakeSpace(double v,
                                       std::size_t num_sources) const {
  if (dim_ == 0) throw FormatError("embedding table is empty");
  return FeatureSpace::Embedding(dim_, v, num_sources);
}

void WriteEmbeddings(const EmbeddingTable& table, std::ostream& out) {
  for (const auto& id : table.ids()) {
    nlohmann::ordered_json obj;
    obj["id"] = id;
    obj["vector"] = table.Lookup(id);
    out << obj.dump() << '\n';
  }
}

FeatureVector VectorizeEmbedding(const Document& doc,
                                 const EmbeddingTable& table,
                                 const FeatureSpace& space) {
  if (space.kind() != FeatureKind::kEmbedding) {
    throw ConfigError("VectorizeEmbedding requires an embedding feature space");
  }
  const auto& vec = table.Lookup(doc.id);
  if (vec.size() != space.dim()) {
    throw FormatError("embedding dimension " + std::to_string(vec.size()) +
                      " does not match feature space " +
                      std::to_string(space.dim()));
  }
  return FeatureVector::Dense(vec);
}

FeatureVector Vectorize(const Document& doc, const FeatureSpace& space,
                        const EmbeddingTable* table) {
  if (space.kind() == FeatureKind::kUnigram) {
    return VectorizeUnigram(doc.text, space);
  }
  if (table == nullptr) {
    throw ConfigError("embedding representation needs an embedding table");
  }
  return VectorizeEmbedding(doc, *table, space);
}

FeatureVector Augment(const FeatureVector& vec, std::size_t c,
                      const FeatureSpace& space) {
  if (c >= space.num_sources()) {
    throw DomainError("confounder category " + std::to_string(c) +
                      " out of range for " +
                      std::to_string(space.num_sources()) + " sources");
  }
  std::vector<double> block(space.num_sources(), 0.0);
  block[c] = space.v();
  return vec.WithConfounder(std::move(block));
}

}  // namespace provshift
