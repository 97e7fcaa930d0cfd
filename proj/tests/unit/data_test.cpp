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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "neuronrank/data.hpp"
#include "neuronrank/error.hpp"
#include "test_util.hpp"

namespace nr = neuronrank;
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> FileBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nr::Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 3.0f);
  nr::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

nr::AttributeDataset TwoClass(const std::vector<std::vector<float>>& rows,
                              const std::vector<int>& labels) {
  nr::Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  std::vector<std::string> types(rows.size(), "w");
  return nr::AttributeDataset(nr::ReprSet::FromMatrix(m), "A", labels, {"a", "b"}, types);
}

}  // namespace

TEST_CASE("NRT1 header round-trip for a 2x3 set") {
  nr::test::TempDir tmp;
  const auto set = nr::ReprSet::FromMatrix(RandomMatrix(2, 3, 1));
  nr::WriteReprFile(set, tmp / "a.nrt");
  const auto back = nr::ReadReprFile(tmp / "a.nrt");
  CHECK(back.rows() == 2);
  CHECK(back.dims() == 3);
  CHECK(back.values() == set.values());
}

TEST_CASE("empty set writes a 16-byte header-only file") {
  nr::test::TempDir tmp;
  nr::WriteReprFile(nr::ReprSet::FromMatrix(nr::Matrix(0, 7)), tmp / "e.nrt");
  const auto bytes = FileBytes(tmp / "e.nrt");
  REQUIRE(bytes.size() == 16);
  CHECK(std::memcmp(bytes.data(), "NRT1", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[12] == 7);
  const auto back = nr::ReadReprFile(tmp / "e.nrt");
  CHECK(back.rows() == 0);
  CHECK(back.dims() == 7);
}

TEST_CASE("1x1 value 1.0 encodes as 00 00 80 3F") {
  nr::test::TempDir tmp;
  nr::Matrix m(1, 1);
  m(0, 0) = 1.0f;
  nr::WriteReprFile(nr::ReprSet::FromMatrix(m), tmp / "one.nrt");
  const auto bytes = FileBytes(tmp / "one.nrt");
  const std::vector<unsigned char> expected = {'N', 'R', 'T', '1', 1, 0, 0, 0, 1, 0,
                                               0,   0,   1,   0,   0, 0, 0, 0, 0x80, 0x3F};
  CHECK(bytes == expected);
}

TEST_CASE("100x768 random round-trip is bit-identical") {
  nr::test::TempDir tmp;
  const auto set = nr::ReprSet::FromMatrix(RandomMatrix(100, 768, 42));
  nr::WriteReprFile(set, tmp / "big.nrt");
  const auto back = nr::ReadReprFile(tmp / "big.nrt");
  CHECK(std::memcmp(back.values().data(), set.values().data(), 100 * 768 * 4) == 0);
}

TEST_CASE("NRT1 error paths") {
  nr::test::TempDir tmp;
  SUBCASE("truncated payload") {
    nr::WriteReprFile(nr::ReprSet::FromMatrix(RandomMatrix(4, 4, 3)), tmp / "t.nrt");
    auto bytes = FileBytes(tmp / "t.nrt");
    bytes.resize(16 + 15 * 4);
    std::ofstream(tmp / "t.nrt", std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(nr::ReadReprFile(tmp / "t.nrt"), nr::FormatError);
  }
  SUBCASE("bad magic") {
    std::ofstream(tmp / "m.nrt", std::ios::binary) << "NRT2xxxxxxxxxxxx";
    CHECK_THROWS_AS(nr::ReadReprFile(tmp / "m.nrt"), nr::FormatError);
  }
  SUBCASE("non-finite value") {
    const unsigned char bytes[] = {'N', 'R', 'T', '1', 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0,
                                   0,   0,   0xC0, 0x7F};
    std::ofstream(tmp / "n.nrt", std::ios::binary).write(reinterpret_cast<const char*>(bytes), 20);
    CHECK_THROWS_AS(nr::ReadReprFile(tmp / "n.nrt"), nr::DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(nr::ReadReprFile(tmp / "absent.nrt"), nr::IoError);
  }
}

TEST_CASE("ReprSet rejects duplicate keys and NaN") {
  nr::Matrix m = nr::Matrix::Zero(2, 2);
  CHECK_THROWS_AS(nr::ReprSet(m, {{"s", 1}, {"s", 1}}, {"a", "b"}), nr::DataError);
  m(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(nr::ReprSet::FromMatrix(m), nr::DataError);
}

TEST_CASE("align_annotations keeps exactly the annotated rows") {
  const nr::AnnotationTable table = {
      {{"s1", 1}, "cats", {{"Number", "Pl"}}},
      {{"s1", 2}, "run", {}},
      {{"s1", 3}, "dog", {{"Number", "Sg"}}},
      {{"s2", 1}, "the", {{"Definite", "Def"}}},
      {{"s2", 2}, "mice", {{"Number", "Pl"}}},
  };
  const auto reprs = nr::AttachTokens(nr::ReprSet::FromMatrix(RandomMatrix(5, 4, 9)), table);
  const auto ds = nr::AlignAnnotations(reprs, table, "Number");
  CHECK(ds.rows() == 3);
  CHECK(ds.label_set() == std::vector<std::string>{"Pl", "Sg"});
  CHECK(ds.labels() == std::vector<int>{0, 1, 0});
  CHECK(ds.word_types() == std::vector<std::string>{"cats", "dog", "mice"});
  CHECK(ds.reprs().values().row(1) == reprs.values().row(2));

  CHECK_THROWS_AS(nr::AlignAnnotations(reprs, table, "Tense"), nr::EmptyTaskError);

  auto extra = table;
  extra.push_back({{"s9", 1}, "ghost", {{"Number", "Sg"}}});
  CHECK_THROWS_AS(nr::AlignAnnotations(reprs, extra, "Number"), nr::AlignmentError);

  const auto single = nr::AlignAnnotations(reprs, table, "Definite");
  CHECK(single.num_classes() == 1);
}

TEST_CASE("annotation and lexicon TSV round-trip") {
  nr::test::TempDir tmp;
  const nr::AnnotationTable table = {{{"s1", 1}, "cats", {{"Number", "Pl"}, {"Case", "Nom"}}},
                                     {{"s1", 2}, "run", {}}};
  nr::WriteAnnotations(table, tmp / "a.tsv");
  const auto back = nr::ReadAnnotations(tmp / "a.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].feats == table[0].feats);
  CHECK(back[1].feats.empty());
  CHECK(nr::FormatFeats(table[0].feats) == "Case=Nom;Number=Pl");

  nr::Lexicon lex;
  lex.Add("slept", {"sleep", {{"Tense", "Pst"}}});
  lex.Add("sleeps", {"sleep", {{"Tense", "Prs"}}});
  nr::WriteLexicon(lex, tmp / "lex.tsv");
  const auto lex2 = nr::ReadLexicon(tmp / "lex.tsv");
  CHECK(lex2.At("slept").lemma == "sleep");
  CHECK_THROWS_AS(lex2.At("woke"), nr::LexiconError);
  CHECK_THROWS_AS(lex.Add("slept", {"x", {}}), nr::DataError);

  std::ofstream(tmp / "bad.tsv") << "sent\ttoken\n";
  CHECK_THROWS_AS(nr::ReadAnnotations(tmp / "bad.tsv"), nr::FormatError);
}

TEST_CASE("class_means") {
  SUBCASE("hand-computed mean") {
    const auto ds = TwoClass({{1, 3}, {3, 5}, {0, 0}}, {0, 0, 1});
    const auto q = nr::ClassMeans(ds);
    CHECK(q(0, 0) == 2.0);
    CHECK(q(0, 1) == 4.0);
    CHECK(q(1, 0) == 0.0);
  }
  SUBCASE("singleton classes equal their rows") {
    const auto ds = TwoClass({{1.5f, -2}, {7, 8}}, {1, 0});
    const auto q = nr::ClassMeans(ds);
    CHECK(q(0, 0) == 7.0);
    CHECK(q(1, 1) == -2.0);
  }
  SUBCASE("identical rows give identical means") {
    const auto ds = TwoClass({{2, 2}, {2, 2}, {2, 2}}, {0, 1, 0});
    const auto q = nr::ClassMeans(ds);
    CHECK(q.row(0) == q.row(1));
  }
  SUBCASE("empty class") {
    const auto ds = TwoClass({{2, 2}, {2, 2}}, {0, 0});
    CHECK_THROWS_AS(nr::ClassMeans(ds), nr::EmptyClassError);
  }
}

TEST_CASE("class_means is invariant to row order (property)") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 40;
    const std::size_t d = 1 + rng() % 6;
    nr::Matrix m = RandomMatrix(n, d, rng());
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
    const nr::AttributeDataset ds(nr::ReprSet::FromMatrix(m), "A", labels, {"a", "b", "c"},
                                  std::vector<std::string>(n, "w"));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto q1 = nr::ClassMeans(ds);
    const auto q2 = nr::ClassMeans(ds.SelectRows(perm));
    CHECK((q1 - q2).cwiseAbs().maxCoeff() < 1e-12);
  }
}
