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

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"
#include "neuronrank/error.hpp"
#include "neuronrank/rankings.hpp"
#include "test_util.hpp"

namespace nr = neuronrank;
using nr::test::MakeDataset;

namespace {

using Order = std::vector<nr::NeuronIndex>;

// Rows equal to the given class means, one row per class.
nr::AttributeDataset FromMeans(const std::vector<std::vector<double>>& means) {
  std::vector<int> labels;
  std::vector<std::string> names;
  for (std::size_t z = 0; z < means.size(); ++z) {
    labels.push_back(static_cast<int>(z));
    names.push_back("z" + std::to_string(z));
  }
  return MakeDataset(means, labels, names);
}

nr::LinearProbe ProbeWithWeights(nr::MatrixD w) {
  nr::LinearProbe p;
  p.subset = nr::AllNeurons(static_cast<std::size_t>(w.cols()));
  p.bias = nr::VectorD::Zero(w.rows());
  p.weights = std::move(w);
  return p;
}

// Quarter-integer data so sums, means and shifts are exact in float and double.
nr::AttributeDataset DyadicData(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                std::size_t classes, double shift = 0.0) {
  std::uniform_int_distribution<int> v(-40, 40);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<int> labels(n);
  std::vector<std::string> names;
  for (std::size_t z = 0; z < classes; ++z) names.push_back("z" + std::to_string(z));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : rows[i]) x = v(rng) / 4.0 + shift;
    labels[i] = static_cast<int>(i % classes);
  }
  return MakeDataset(rows, labels, names);
}

double SubsetAccuracy(const nr::GaussianProbe& g, const nr::AttributeDataset& dev,
                      const nr::NeuronSubset& s) {
  return nr::PredictGaussian(g, dev, s).accuracy;
}

// XOR layout on two neurons: class a on the (+,+)/(-,-) diagonal, class b on
// the other. Each marginal is the same multiset for both classes.
nr::AttributeDataset XorData(bool with_weak_third) {
  const double offsets[][2] = {{0, 0}, {0.25, 0}, {-0.25, 0}, {0, 0.25}, {0, -0.25}};
  const double centers_a[][2] = {{1, 1}, {-1, -1}};
  const double centers_b[][2] = {{1, -1}, {-1, 1}};
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int t = 0;
  for (int z = 0; z < 2; ++z) {
    for (const auto& c : z == 0 ? centers_a : centers_b) {
      for (const auto& o : offsets) {
        std::vector<double> row = {c[0] + o[0], c[1] + o[1]};
        // Third neuron: right for 3 of every 5 rows of each class.
        if (with_weak_third) row.push_back((t++ % 5 < 3) == (z == 0) ? 0.5 : -0.5);
        rows.push_back(row);
        labels.push_back(z);
      }
    }
  }
  return MakeDataset(rows, labels, {"a", "b"});
}

}  // namespace

TEST_CASE("probeless hand cases") {
  SUBCASE("equal means give the identity order") {
    const auto r = nr::ProbelessRank(FromMeans({{1, 2, 3}, {1, 2, 3}}));
    CHECK(r.order == Order{0, 1, 2});
    CHECK(r.method == nr::RankMethod::kProbeless);
    CHECK(r.variant == nr::RankVariant::kTopToBottom);
  }
  SUBCASE("d=3 two classes") {
    const auto ds = FromMeans({{0, 1, 5}, {0, 3, 4}});
    CHECK(nr::ProbelessScores(ds) == std::vector<double>{0, 2, 1});
    CHECK(nr::ProbelessRank(ds).order == Order{1, 2, 0});
  }
  SUBCASE("three classes sum unordered pairs") {
    const auto ds = FromMeans({{1, 0}, {2, 0}, {4, 0}});
    CHECK(nr::ProbelessScores(ds) == std::vector<double>{6, 0});
    CHECK(nr::ProbelessRank(ds).order == Order{0, 1});
  }
  SUBCASE("single class") {
    const auto ds = MakeDataset({{1}, {2}}, {0, 0}, {"only"});
    CHECK_THROWS_AS(nr::ProbelessRank(ds), nr::DegenerateTaskError);
  }
}

TEST_CASE("probeless invariances (property)") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6 + rng() % 30;
    const std::size_t d = 1 + rng() % 8;
    const std::size_t classes = 2 + rng() % 3;
    const double shift = static_cast<double>(static_cast<int>(rng() % 41) - 20) / 2.0;
    std::mt19937_64 a(trial), b(trial);
    const auto base = DyadicData(a, n, d, classes);
    const auto shifted = DyadicData(b, n, d, classes, shift);
    const auto r = nr::ProbelessScores(base);
    const auto rs = nr::ProbelessScores(shifted);
    for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(rs[j] - r[j]) < 1e-12);
    for (double v : r) CHECK(v >= 0.0);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(nr::ProbelessRank(base.SelectRows(perm)).order == nr::ProbelessRank(base).order);
    std::vector<std::size_t> doubled(perm);
    doubled.insert(doubled.end(), perm.begin(), perm.end());
    CHECK(nr::ProbelessRank(base.SelectRows(doubled)).order == nr::ProbelessRank(base).order);
  }
}

TEST_CASE("linear rank hand cases") {
  CHECK(nr::LinearScores(ProbeWithWeights(nr::MatrixD{{1, -2}, {3, 0}})) ==
        std::vector<double>{2, 1});
  CHECK(nr::LinearRank(ProbeWithWeights(nr::MatrixD{{1, -2}, {3, 0}}), 2).order == Order{0, 1});
  CHECK(nr::LinearRank(ProbeWithWeights(nr::MatrixD::Zero(2, 3)), 3).order == Order{0, 1, 2});
  CHECK(nr::LinearRank(ProbeWithWeights(nr::MatrixD{{0, 5}, {0, -5}}), 2).order == Order{1, 0});
  auto strict = ProbeWithWeights(nr::MatrixD::Ones(2, 2));
  strict.subset = {0, 2};
  CHECK_THROWS_AS(nr::LinearRank(strict, 3), nr::SubsetMismatchError);
}

TEST_CASE("greedy on a single neuron") {
  const auto ds = MakeDataset({{0}, {0.5}, {2}, {2.5}}, {0, 0, 1, 1}, {"a", "b"});
  const auto g = nr::GaussianGreedyRank(ds, ds, 1);
  CHECK(g.ranking.order == Order{0});
  CHECK(g.ranking.method == nr::RankMethod::kGaussian);
}

TEST_CASE("greedy finds a noiseless discriminative neuron") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise;
  for (nr::NeuronIndex star = 0; star < 8; ++star) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 80; ++i) {
      std::vector<double> row(8);
      for (auto& v : row) v = noise(rng);
      row[star] = i % 2;
      rows.push_back(row);
      labels.push_back(i % 2);
    }
    const auto ds = MakeDataset(rows, labels, {"a", "b"});
    std::vector<std::size_t> train_rows(40), dev_rows(40);
    std::iota(train_rows.begin(), train_rows.end(), 0);
    std::iota(dev_rows.begin(), dev_rows.end(), 40);
    const auto train = ds.SelectRows(train_rows);
    const auto dev = ds.SelectRows(dev_rows);

    // Oracle: brute force over every single neuron.
    const auto probe = nr::FitGaussian(train);
    std::vector<double> single(8);
    for (nr::NeuronIndex j = 0; j < 8; ++j) single[j] = SubsetAccuracy(probe, dev, {j});
    const auto oracle = static_cast<nr::NeuronIndex>(
        std::max_element(single.begin(), single.end()) - single.begin());
    CHECK(oracle == star);

    const auto g = nr::GaussianGreedyRank(train, dev, 3);
    CHECK(g.ranking.order.front() == star);
    CHECK(nr::IsPermutation(g.ranking.order));
    CHECK(g.single_accuracy == single);
    CHECK(g.step_accuracy.front() == 1.0);
  }
}

TEST_CASE("greedy step 1 falls back to the tie-break on XOR data") {
  const auto ds = XorData(false);
  const auto probe = nr::FitGaussian(ds);
  // Exhaustive oracle over subsets of size 1 and 2.
  CHECK(SubsetAccuracy(probe, ds, {0}) == 0.5);
  CHECK(SubsetAccuracy(probe, ds, {1}) == 0.5);
  CHECK(SubsetAccuracy(probe, ds, {0, 1}) == 1.0);

  const auto g = nr::GaussianGreedyRank(ds, ds, 2);
  CHECK(g.ranking.order == Order{0, 1});
  CHECK(g.step_accuracy == std::vector<double>{0.5, 1.0});
}

TEST_CASE("greedy prefix can miss the best pair") {
  const auto ds = XorData(true);
  const auto probe = nr::FitGaussian(ds);
  double best_pair = 0.0;
  nr::NeuronSubset best;
  for (nr::NeuronIndex a = 0; a < 3; ++a) {
    for (nr::NeuronIndex b = a + 1; b < 3; ++b) {
      const double acc = SubsetAccuracy(probe, ds, {a, b});
      if (acc > best_pair) {
        best_pair = acc;
        best = {a, b};
      }
    }
  }
  CHECK(best == nr::NeuronSubset{0, 1});
  const auto g = nr::GaussianGreedyRank(ds, ds, 2);
  CHECK(g.ranking.order.front() == 2);
  CHECK(g.step_accuracy[1] < best_pair);
  CHECK(g.step_accuracy[1] == SubsetAccuracy(probe, ds, g.ranking.Top(2)));
}

TEST_CASE("greedy tail is ordered by single-neuron accuracy") {
  const auto o = [] {
    nr::ParadigmOptions p;
    p.d = 16;
    p.planted = {3, 9};
    p.noise_sigma = 0.6;
    p.tokens = 600;
    p.seed = 30;
    return p;
  }();
  const auto data = nr::test::MakePlanted(o);
  const auto g = nr::GaussianGreedyRank(data.train, data.dev, 4, 2);
  REQUIRE(nr::IsPermutation(g.ranking.order));
  CHECK(g.step_accuracy.size() == 4);
  for (std::size_t p = 5; p < 16; ++p) {
    CHECK(g.single_accuracy[g.ranking.order[p - 1]] >= g.single_accuracy[g.ranking.order[p]]);
  }
  // Thread count does not change the result.
  const auto g1 = nr::GaussianGreedyRank(data.train, data.dev, 4, 1);
  CHECK(g1.ranking == g.ranking);
  // Each recorded step accuracy matches a direct prediction on the prefix.
  const auto probe = nr::FitGaussian(data.train);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(g.step_accuracy[s] == SubsetAccuracy(probe, data.dev, g.ranking.Top(s + 1)));
  }
  CHECK_THROWS_AS(nr::GaussianGreedyRank(data.train, data.dev, 0), nr::RangeError);
  CHECK_THROWS_AS(nr::GaussianGreedyRank(data.train, data.dev, 17), nr::RangeError);
}

TEST_CASE("greedy first pick is the single-neuron argmax (property)") {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t d = 2 + rng() % 7;
    const std::size_t classes = 2 + rng() % 2;
    auto make = [&](std::size_t n) {
      std::vector<std::vector<double>> rows(n, std::vector<double>(d));
      std::vector<int> labels(n);
      std::vector<std::string> names;
      for (std::size_t z = 0; z < classes; ++z) names.push_back("z" + std::to_string(z));
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(i % classes);
        for (std::size_t j = 0; j < d; ++j) rows[i][j] = g(rng) + 0.3 * static_cast<double>(j % 3) * labels[i];
      }
      return MakeDataset(rows, labels, names);
    };
    const auto train = make(30 + rng() % 30);
    const auto dev = make(20 + rng() % 20);
    const auto allowed = nr::test::SingleNeuronArgmax(train, dev);
    const auto first = nr::GaussianGreedyRank(train, dev, 1).ranking.order.front();
    CHECK(std::find(allowed.begin(), allowed.end(), first) != allowed.end());
  }
}

TEST_CASE("high signal-to-noise puts planted neurons first for every method") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    nr::ParadigmOptions o;
    o.d = 32;
    o.planted = {1, 7, 12, 20, 31};
    o.noise_sigma = 0.05;
    o.tokens = 1000;
    o.seed = seed;
    const auto data = nr::test::MakePlanted(o);
    const std::vector<nr::Ranking> rankings = {
        nr::ProbelessRank(data.train),
        nr::LinearRank(nr::TrainLinear(data.train, nr::AllNeurons(32)), 32),
        nr::GaussianGreedyRank(data.train, data.dev, 5).ranking};
    for (const auto& r : rankings) {
      auto top = r.Top(5);
      std::sort(top.begin(), top.end());
      CHECK_MESSAGE(top == o.planted, r.Label());
    }
  }
}

TEST_CASE("reverse") {
  nr::Ranking r;
  r.order = {2, 0, 1};
  const auto rev = nr::Reverse(r);
  CHECK(rev.order == Order{1, 0, 2});
  CHECK(rev.variant == nr::RankVariant::kBottomToTop);
  CHECK(nr::Reverse(rev) == r);
}

TEST_CASE("random rank") {
  CHECK(nr::RandomRank(10, 5) == nr::RandomRank(10, 5));
  CHECK(nr::RandomRank(1, 9).order == Order{0});
  CHECK(nr::RandomRank(10, 5).method == nr::RankMethod::kRandom);
  CHECK(nr::IsPermutation(nr::RandomRank(100, 3).order));

  std::map<Order, int> counts;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) ++counts[nr::RandomRank(4, static_cast<std::uint64_t>(s)).order];
  CHECK(counts.size() == 24);
  for (const auto& [order, c] : counts) {
    CHECK(std::abs(static_cast<double>(c) / seeds - 1.0 / 24.0) < 0.01);
  }
}

TEST_CASE("method and variant names") {
  CHECK(nr::ParseRankMethod("gaussian") == nr::RankMethod::kGaussian);
  CHECK(nr::ParseRankVariant("btt") == nr::RankVariant::kBottomToTop);
  CHECK_THROWS_AS(nr::ParseRankMethod("oracle"), nr::DataError);
  nr::Ranking r;
  r.method = nr::RankMethod::kLinear;
  CHECK(r.Label() == "linear/top-to-bottom");
  CHECK_THROWS_AS(r.Top(1), nr::RangeError);
}
