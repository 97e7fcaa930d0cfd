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

#include "neuronrank/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "neuronrank/error.hpp"

namespace neuronrank {
namespace {

constexpr std::array<char, 4> kMagic = {'N', 'R', 'T', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 16;

void PutU32(std::uint32_t v, unsigned char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t GetU32(const unsigned char* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// Reads all non-empty lines after checking the header line.
std::vector<std::vector<std::string>> ReadTsv(const std::filesystem::path& path,
                                              const std::string& header,
                                              std::size_t columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw FormatError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != columns) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

ReprSet::ReprSet(Matrix values, std::vector<TokenKey> keys,
                 std::vector<std::string> surfaces)
    : values_(std::move(values)),
      keys_(std::move(keys)),
      surfaces_(std::move(surfaces)) {
  if (keys_.size() != rows() || surfaces_.size() != rows()) {
    throw DataError("ReprSet: keys/surfaces do not match row count");
  }
  if (!values_.allFinite()) throw DataError("ReprSet: non-finite value");
  std::set<TokenKey> seen;
  for (const auto& k : keys_) {
    if (!seen.insert(k).second) {
      throw DataError("ReprSet: duplicate token key (" + k.sent_id + ", " +
                      std::to_string(k.token_id) + ")");
    }
  }
}

ReprSet ReprSet::FromMatrix(Matrix values) {
  const auto n = static_cast<std::size_t>(values.rows());
  std::vector<TokenKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i].token_id = static_cast<int>(i);
  return ReprSet(std::move(values), std::move(keys),
                 std::vector<std::string>(n));
}

ReprSet ReprSet::SelectRows(std::span<const std::size_t> rows) const {
  Matrix m(static_cast<Eigen::Index>(rows.size()), values_.cols());
  std::vector<TokenKey> keys;
  std::vector<std::string> surfaces;
  keys.reserve(rows.size());
  surfaces.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= this->rows()) throw IndexError("ReprSet: row out of range");
    m.row(static_cast<Eigen::Index>(i)) =
        values_.row(static_cast<Eigen::Index>(rows[i]));
    keys.push_back(keys_[rows[i]]);
    surfaces.push_back(surfaces_[rows[i]]);
  }
  ReprSet out;
  out.values_ = std::move(m);
  out.keys_ = std::move(keys);
  out.surfaces_ = std::move(surfaces);
  return out;
}

ReprSet ReadReprFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError(path.string() + ": missing NRT1 header");
  }
  const std::uint32_t version = GetU32(bytes.data() + 4);
  if (version != kVersion) {
    throw FormatError(path.string() + ": unsupported version " +
                      std::to_string(version));
  }
  const std::uint64_t rows = GetU32(bytes.data() + 8);
  const std::uint64_t cols = GetU32(bytes.data() + 12);
  const std::uint64_t expected = kHeaderBytes + rows * cols * 4;
  if (bytes.size() < expected) {
    throw FormatError(path.string() + ": truncated payload (" +
                      std::to_string(bytes.size()) + " of " +
                      std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) {
    throw FormatError(path.string() + ": trailing bytes after payload");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const unsigned char* p = bytes.data() + kHeaderBytes;
  float* dst = m.data();
  for (std::uint64_t i = 0; i < rows * cols; ++i, p += 4) {
    const float v = std::bit_cast<float>(GetU32(p));
    if (!std::isfinite(v)) {
      throw DataError(path.string() + ": non-finite value at row " +
                      std::to_string(i / cols) + ", col " +
                      std::to_string(i % cols));
    }
    dst[i] = v;
  }
  return ReprSet::FromMatrix(std::move(m));
}

void WriteReprFile(const ReprSet& set, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(kHeaderBytes + set.rows() * set.dims() * 4);
  std::memcpy(bytes.data(), kMagic.data(), kMagic.size());
  PutU32(kVersion, bytes.data() + 4);
  PutU32(static_cast<std::uint32_t>(set.rows()), bytes.data() + 8);
  PutU32(static_cast<std::uint32_t>(set.dims()), bytes.data() + 12);
  unsigned char* p = bytes.data() + kHeaderBytes;
  const float* src = set.values().data();
  for (std::size_t i = 0; i < set.rows() * set.dims(); ++i, p += 4) {
    PutU32(std::bit_cast<std::uint32_t>(src[i]), p);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Features ParseFeats(const std::string& field) {
  Features feats;
  if (field.empty() || field == "_") return feats;
  std::stringstream ss(field);
  std::string pair;
  while (std::getline(ss, pair, ';')) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      throw FormatError("malformed feature '" + pair + "'");
    }
    feats[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return feats;
}

std::string FormatFeats(const Features& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [k, v] : feats) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

AnnotationTable ReadAnnotations(const std::filesystem::path& path) {
  AnnotationTable table;
  for (auto& f : ReadTsv(path, "sent_id\ttoken_id\tsurface\tfeats", 4)) {
    AnnotationRow row;
    row.key.sent_id = f[0];
    try {
      row.key.token_id = std::stoi(f[1]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad token_id '" + f[1] + "'");
    }
    row.surface = f[2];
    row.feats = ParseFeats(f[3]);
    table.push_back(std::move(row));
  }
  return table;
}

void WriteAnnotations(const AnnotationTable& table,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "sent_id\ttoken_id\tsurface\tfeats\n";
  for (const auto& r : table) {
    out << r.key.sent_id << '\t' << r.key.token_id << '\t' << r.surface << '\t'
        << FormatFeats(r.feats) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ReprSet AttachTokens(const ReprSet& reprs, const AnnotationTable& table) {
  if (table.size() != reprs.rows()) {
    throw AlignmentError("representation rows (" + std::to_string(reprs.rows()) +
                         ") and annotation rows (" +
                         std::to_string(table.size()) + ") differ");
  }
  std::vector<TokenKey> keys;
  std::vector<std::string> surfaces;
  for (const auto& r : table) {
    keys.push_back(r.key);
    surfaces.push_back(r.surface);
  }
  return ReprSet(reprs.values(), std::move(keys), std::move(surfaces));
}

AttributeDataset::AttributeDataset(ReprSet reprs, std::string attribute,
                                   std::vector<int> labels,
                                   std::vector<std::string> label_set,
                                   std::vector<std::string> word_types)
    : reprs_(std::move(reprs)),
      attribute_(std::move(attribute)),
      labels_(std::move(labels)),
      label_set_(std::move(label_set)),
      word_types_(std::move(word_types)) {
  if (labels_.size() != reprs_.rows() || word_types_.size() != reprs_.rows()) {
    throw DataError("AttributeDataset: labels/word types do not match rows");
  }
  for (int z : labels_) {
    if (z < 0 || static_cast<std::size_t>(z) >= label_set_.size()) {
      throw DataError("AttributeDataset: label outside label set");
    }
  }
}

std::vector<std::size_t> AttributeDataset::ClassCounts() const {
  std::vector<std::size_t> counts(label_set_.size(), 0);
  for (int z : labels_) ++counts[static_cast<std::size_t>(z)];
  return counts;
}

AttributeDataset AttributeDataset::WithLabels(std::vector<int> labels) const {
  return AttributeDataset(reprs_, attribute_, std::move(labels), label_set_,
                          word_types_);
}

AttributeDataset AttributeDataset::SelectRows(
    std::span<const std::size_t> rows) const {
  std::vector<int> labels;
  std::vector<std::string> types;
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw IndexError("AttributeDataset: row out of range");
    labels.push_back(labels_[r]);
    types.push_back(word_types_[r]);
  }
  return AttributeDataset(reprs_.SelectRows(rows), attribute_, std::move(labels),
                          label_set_, std::move(types));
}

AttributeDataset AttributeDataset::WithLabelSet(
    std::vector<std::string> label_set) const {
  std::vector<int> labels;
  labels.reserve(labels_.size());
  for (int z : labels_) {
    const auto& name = label_set_[static_cast<std::size_t>(z)];
    auto it = std::find(label_set.begin(), label_set.end(), name);
    if (it == label_set.end()) {
      throw DataError("label '" + name + "' not in target label set");
    }
    labels.push_back(static_cast<int>(it - label_set.begin()));
  }
  return AttributeDataset(reprs_, attribute_, std::move(labels),
                          std::move(label_set), word_types_);
}

AttributeDataset AlignAnnotations(const ReprSet& reprs,
                                  const AnnotationTable& annotations,
                                  const std::string& attribute) {
  std::map<TokenKey, std::size_t> row_of;
  for (std::size_t i = 0; i < reprs.rows(); ++i) row_of[reprs.keys()[i]] = i;

  // Representation row -> value, for rows whose annotation has the attribute.
  std::map<std::size_t, std::string> value_of;
  for (const auto& a : annotations) {
    auto it = row_of.find(a.key);
    if (it == row_of.end()) {
      throw AlignmentError("annotation (" + a.key.sent_id + ", " +
                           std::to_string(a.key.token_id) +
                           ") has no representation row");
    }
    auto f = a.feats.find(attribute);
    if (f != a.feats.end()) value_of[it->second] = f->second;
  }
  if (value_of.empty()) {
    throw EmptyTaskError("no token carries attribute '" + attribute + "'");
  }

  std::set<std::string> values;
  for (const auto& [row, v] : value_of) values.insert(v);
  std::vector<std::string> label_set(values.begin(), values.end());

  std::vector<std::size_t> rows;
  std::vector<int> labels;
  std::vector<std::string> types;
  for (const auto& [row, v] : value_of) {
    rows.push_back(row);
    labels.push_back(static_cast<int>(
        std::lower_bound(label_set.begin(), label_set.end(), v) -
        label_set.begin()));
    types.push_back(reprs.surfaces()[row]);
  }
  return AttributeDataset(reprs.SelectRows(rows), attribute, std::move(labels),
                          std::move(label_set), std::move(types));
}

MatrixD ClassMeans(const AttributeDataset& dataset) {
  const auto k = static_cast<Eigen::Index>(dataset.num_classes());
  const auto d = static_cast<Eigen::Index>(dataset.dims());
  MatrixD sums = MatrixD::Zero(k, d);
  std::vector<std::size_t> counts(dataset.num_classes(), 0);
  const Matrix& x = dataset.reprs().values();
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    const int z = dataset.labels()[i];
    sums.row(z) += x.row(static_cast<Eigen::Index>(i)).cast<double>();
    ++counts[static_cast<std::size_t>(z)];
  }
  for (Eigen::Index z = 0; z < k; ++z) {
    if (counts[static_cast<std::size_t>(z)] == 0) {
      throw EmptyClassError("class '" +
                            dataset.label_set()[static_cast<std::size_t>(z)] +
                            "' has no rows");
    }
    sums.row(z) /= static_cast<double>(counts[static_cast<std::size_t>(z)]);
  }
  return sums;
}

void Lexicon::Add(const std::string& surface, LexEntry entry) {
  if (entry.lemma.empty()) throw DataError("lexicon: empty lemma for " + surface);
  if (!entries_.emplace(surface, std::move(entry)).second) {
    throw DataError("lexicon: duplicate surface '" + surface + "'");
  }
}

const LexEntry* Lexicon::Find(const std::string& surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? nullptr : &it->second;
}

const LexEntry& Lexicon::At(const std::string& surface) const {
  const LexEntry* e = Find(surface);
  if (e == nullptr) throw LexiconError("token '" + surface + "' not in lexicon");
  return *e;
}

Lexicon ReadLexicon(const std::filesystem::path& path) {
  Lexicon lex;
  for (auto& f : ReadTsv(path, "surface\tlemma\tfeats", 3)) {
    lex.Add(f[0], LexEntry{f[1], ParseFeats(f[2])});
  }
  return lex;
}

void WriteLexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "surface\tlemma\tfeats\n";
  for (const auto& [surface, e] : lexicon.entries()) {
    out << surface << '\t' << e.lemma << '\t' << FormatFeats(e.feats) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace neuronrank
