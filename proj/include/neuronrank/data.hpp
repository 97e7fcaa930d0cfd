// Copyright 2026 The NeuronRank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Data model for word representations and their morphological annotations.
//
// A ReprSet is an N x d matrix of activations, one row per word, stored as
// binary32 exactly as it appears on disk. Annotations are joined to rows by
// (sentence id, token index); the NRT1 file itself carries no keys, so keys
// are attached positionally from the annotation table that accompanies it.

#ifndef NEURONRANK_DATA_HPP_
#define NEURONRANK_DATA_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace neuronrank {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixD = Eigen::MatrixXd;
using VectorD = Eigen::VectorXd;

// Neuron indices of a representation.
using NeuronIndex = std::size_t;
using NeuronSubset = std::vector<NeuronIndex>;

struct TokenKey {
  std::string sent_id;
  int token_id = 0;

  auto operator<=>(const TokenKey&) const = default;
  bool operator==(const TokenKey&) const = default;
};

// Attribute name -> value, e.g. {"Number": "Pl", "Tense": "Pst"}.
using Features = std::map<std::string, std::string>;

class ReprSet {
 public:
  ReprSet() = default;
  // Throws DataError on non-finite values, duplicate keys or size mismatch.
  ReprSet(Matrix values, std::vector<TokenKey> keys,
          std::vector<std::string> surfaces);
  // Keys ("", i) and empty surfaces; used for files read without annotations.
  static ReprSet FromMatrix(Matrix values);

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const { return values_; }
  const std::vector<TokenKey>& keys() const { return keys_; }
  const std::vector<std::string>& surfaces() const { return surfaces_; }
  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dims(), dims()};
  }

  ReprSet SelectRows(std::span<const std::size_t> rows) const;

 private:
  Matrix values_{0, 0};
  std::vector<TokenKey> keys_;
  std::vector<std::string> surfaces_;
};

// NRT1: magic, u32 version=1, u32 rows, u32 cols, then row-major LE binary32.
ReprSet ReadReprFile(const std::filesystem::path& path);
void WriteReprFile(const ReprSet& set, const std::filesystem::path& path);

struct AnnotationRow {
  TokenKey key;
  std::string surface;
  Features feats;
};
using AnnotationTable = std::vector<AnnotationRow>;

// TSV with header `sent_id\ttoken_id\tsurface\tfeats`; feats are `A=V;B=W`
// or `_` for none.
AnnotationTable ReadAnnotations(const std::filesystem::path& path);
void WriteAnnotations(const AnnotationTable& table,
                      const std::filesystem::path& path);
Features ParseFeats(const std::string& field);
std::string FormatFeats(const Features& feats);

// Row i of `reprs` takes the key and surface of annotation row i.
ReprSet AttachTokens(const ReprSet& reprs, const AnnotationTable& table);

// A ReprSet restricted to the tokens that carry one attribute, with labels.
class AttributeDataset {
 public:
  AttributeDataset() = default;
  // `labels` index into `label_set`; throws DataError when inconsistent.
  AttributeDataset(ReprSet reprs, std::string attribute,
                   std::vector<int> labels, std::vector<std::string> label_set,
                   std::vector<std::string> word_types);

  const ReprSet& reprs() const { return reprs_; }
  const std::string& attribute() const { return attribute_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& label_set() const { return label_set_; }
  const std::vector<std::string>& word_types() const { return word_types_; }
  std::size_t rows() const { return reprs_.rows(); }
  std::size_t dims() const { return reprs_.dims(); }
  std::size_t num_classes() const { return label_set_.size(); }

  // Row counts per label index.
  std::vector<std::size_t> ClassCounts() const;
  // Same rows, labels replaced; label_set kept.
  AttributeDataset WithLabels(std::vector<int> labels) const;
  AttributeDataset SelectRows(std::span<const std::size_t> rows) const;
  // Maps label strings onto this dataset's label set; throws DataError for
  // values it does not contain.
  AttributeDataset WithLabelSet(std::vector<std::string> label_set) const;

 private:
  ReprSet reprs_;
  std::string attribute_;
  std::vector<int> labels_;
  std::vector<std::string> label_set_;
  std::vector<std::string> word_types_;
};

// Keeps exactly the rows whose annotation has a value for `attribute`.
// label_set is the lexicographically sorted set of values present.
AttributeDataset AlignAnnotations(const ReprSet& reprs,
                                  const AnnotationTable& annotations,
                                  const std::string& attribute);

// Row z holds the mean of all rows labeled z (|Z| x d).
MatrixD ClassMeans(const AttributeDataset& dataset);

struct LexEntry {
  std::string lemma;
  Features feats;
};

class Lexicon {
 public:
  Lexicon() = default;
  // Throws DataError on a duplicate surface or an empty lemma.
  void Add(const std::string& surface, LexEntry entry);
  const LexEntry* Find(const std::string& surface) const;
  // Throws LexiconError naming the token.
  const LexEntry& At(const std::string& surface) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, LexEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, LexEntry> entries_;
};

// TSV with header `surface\tlemma\tfeats`.
Lexicon ReadLexicon(const std::filesystem::path& path);
void WriteLexicon(const Lexicon& lexicon, const std::filesystem::path& path);

}  // namespace neuronrank

#endif  // NEURONRANK_DATA_HPP_
