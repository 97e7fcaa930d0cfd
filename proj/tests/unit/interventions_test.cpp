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
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "neuronrank/error.hpp"
#include "neuronrank/interventions.hpp"
#include "neuronrank/rankings.hpp"
#include "test_util.hpp"

namespace nr = neuronrank;

namespace {

nr::Ranking Order(std::vector<nr::NeuronIndex> order) {
  nr::Ranking r;
  r.order = std::move(order);
  return r;
}

nr::LexiconAnalyzer Animals() {
  nr::Lexicon lex;
  lex.Add("cat", {"cat", {{"Number", "Sg"}}});
  lex.Add("cats", {"cat", {{"Number", "Pl"}}});
  lex.Add("dog", {"dog", {{"Number", "Sg"}}});
  lex.Add("dogs", {"dog", {{"Number", "Pl"}}});
  lex.Add("sleeps", {"sleep", {{"Tense", "Prs"}}});
  lex.Add("slept", {"sleep", {{"Tense", "Pst"}}});
  lex.Add("the", {"the", {}});
  return nr::LexiconAnalyzer(std::move(lex));
}

struct PlantedSetup {
  nr::test::PlantedData data;
  nr::ToyLinearDecoder decoder;
  nr::LexiconAnalyzer analyzer;
  nr::MatrixD means;
};

PlantedSetup MakeSetup(std::uint64_t seed) {
  nr::ParadigmOptions o;
  o.d = 64;
  o.planted = {0, 1, 2, 3, 4, 5, 6, 7};
  o.lemma_neurons = {60, 61, 62, 63};
  o.noise_sigma = 0.3;
  o.tokens = 2000;
  o.seed = seed;
  auto data = nr::test::MakePlanted(o);
  const auto& t = data.corpus.truth;
  auto decoder = nr::ToyLinearDecoder::NearestPrototype(t.prototypes, t.vocab_surfaces, t.AllPlanted());
  nr::LexiconAnalyzer analyzer(data.corpus.lexicon);
  auto means = nr::ClassMeans(data.train);
  return {std::move(data), std::move(decoder), std::move(analyzer), std::move(means)};
}

}  // namespace

TEST_CASE("ablate") {
  const std::vector<double> h = {5, 6, 7};
  const auto r = Order({2, 0, 1});
  CHECK(nr::Ablate(h, r, 0) == h);
  CHECK(nr::Ablate(h, r, 3) == std::vector<double>{0, 0, 0});
  CHECK(nr::Ablate(h, r, 2) == std::vector<double>{0, 6, 0});
  CHECK_THROWS_AS(nr::Ablate(h, r, 4), nr::RangeError);
}

TEST_CASE("translation coefficients") {
  const auto a = nr::TranslationCoefficients(4, 8.0);
  CHECK(a[0] == 8.0);
  CHECK(a[1] == doctest::Approx(8.0 * std::log(3.0) / std::log(4.0)).epsilon(1e-14));
  CHECK(a[1] == doctest::Approx(6.3399).epsilon(1e-4));
  CHECK(a[2] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(a[3] == 0.0);
  for (std::size_t d = 2; d < 200; d += 7) {
    const auto b = nr::TranslationCoefficients(d, 3.5);
    CHECK(b.front() == 3.5);
    CHECK(b.back() == 0.0);
    for (std::size_t p = 1; p < d; ++p) CHECK(b[p] <= b[p - 1]);
  }
  for (double v : nr::TranslationCoefficients(10, 0.0)) CHECK(v == 0.0);
  CHECK_THROWS_AS(nr::TranslationCoefficients(1, 8.0), nr::RangeError);
  CHECK_THROWS_AS(nr::TranslationCoefficients(4, -1.0), nr::RangeError);
}

TEST_CASE("translate hand cases") {
  const nr::MatrixD means{{0, 0}, {1, 0}};
  const auto p = nr::MakeTranslationParams(2, 8.0);
  const std::vector<double> h = {1, 1};
  CHECK(nr::Translate(h, Order({0, 1}), 2, p, means, 0, 1) == std::vector<double>{9, 1});
  CHECK(nr::Translate(h, Order({0, 1}), 0, p, means, 0, 1) == h);
  const nr::MatrixD same{{3, 4}, {3, 4}};
  CHECK(nr::Translate(h, Order({1, 0}), 2, p, same, 0, 1) == h);
  CHECK_THROWS_AS(nr::Translate(h, Order({0, 1}), 1, p, means, 1, 1), nr::SameValueError);
}

TEST_CASE("interventions touch only the top-k coordinates (property)") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 2 + rng() % 30;
    const std::size_t k = rng() % (d + 1);
    std::vector<double> h(d);
    for (auto& v : h) v = g(rng);
    nr::MatrixD means(3, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = g(rng);
    const auto r = nr::RandomRank(d, rng());
    const auto b1 = 0.5 + static_cast<double>(rng() % 8);
    const auto b2 = 0.5 + static_cast<double>(rng() % 8);
    const auto t = nr::Translate(h, r, k, nr::MakeTranslationParams(d, b1), means, 2, 0);
    const auto a = nr::Ablate(h, r, k);
    for (std::size_t p = k; p < d; ++p) {
      const auto j = r.order[p];
      CHECK(std::memcmp(&t[j], &h[j], sizeof(double)) == 0);
      CHECK(std::memcmp(&a[j], &h[j], sizeof(double)) == 0);
    }
    // Linear in beta.
    const auto t2 = nr::Translate(h, r, k, nr::MakeTranslationParams(d, b2), means, 2, 0);
    const auto t12 = nr::Translate(h, r, k, nr::MakeTranslationParams(d, b1 + b2), means, 2, 0);
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(t12[j] - h[j] == doctest::Approx((t[j] - h[j]) + (t2[j] - h[j])).epsilon(1e-9));
    }
  }
}

TEST_CASE("toy decoder") {
  const nr::MatrixD scores{{1, 0}, {0, 1}, {0, 1}};
  const nr::ToyLinearDecoder dec(scores, nr::VectorD::Zero(3), {"a", "b", "c"});
  CHECK(dec.Decode(std::vector<double>{2, 1}) == 0);
  CHECK(dec.Decode(std::vector<double>{1, 2}) == 1);  // tie between 1 and 2
  CHECK(dec.Decode(std::vector<double>{0, 0}) == 0);
  CHECK_THROWS_AS(nr::ToyLinearDecoder(scores, nr::VectorD::Zero(2), {"a", "b", "c"}), nr::DataError);

  const nr::MatrixD protos{{0, 5, 1}, {3, -5, 1}};
  const auto nearest = nr::ToyLinearDecoder::NearestPrototype(protos, {"p", "q"}, {0, 2});
  CHECK(nearest.Decode(std::vector<double>{2.0, 100.0, 0.0}) == 1);
  CHECK(nearest.Decode(std::vector<double>{1.0, -100.0, 0.0}) == 0);
  CHECK(nearest.scores().col(1).isZero(0));
}

TEST_CASE("clwv") {
  const auto an = Animals();
  CHECK(nr::Clwv({"sleeps"}, {"slept"}, an, "Tense") == 1.0);
  CHECK(nr::Clwv({"cats", "dog"}, {"cats", "dog"}, an, "Number") == 0.0);
  CHECK(nr::Clwv({"cats", "dog"}, {"cat", "dog"}, an, "Number") == 0.5);
  CHECK(nr::Clwv({"cats"}, {"dog"}, an, "Number") == 0.0);
  CHECK_THROWS_AS(nr::Clwv({"cats"}, {"mice"}, an, "Number"), nr::LexiconError);
}

TEST_CASE("saturation point") {
  const auto s = nr::SaturationPoint({0.10, 0.20, 0.30, 0.31, 0.315, 0.312});
  CHECK(s.index == 2);
  CHECK(s.value == 0.30);
  CHECK(s.saturated);
  const auto doubling = nr::SaturationPoint({1, 2, 4, 8, 16});
  CHECK(doubling.index == 4);
  CHECK_FALSE(doubling.saturated);
  const auto zeros = nr::SaturationPoint({0, 0, 0, 0});
  CHECK(zeros.index == 0);
  CHECK(zeros.saturated);
  // 0 -> positive is an infinite ratio.
  CHECK(nr::SaturationPoint({0, 1, 1, 1}).index == 1);
  CHECK_THROWS_AS(nr::SaturationPoint({1, 2}), nr::RangeError);
}

TEST_CASE("planted intervention consistency") {
  auto s = MakeSetup(5);
  const auto ttb = nr::ProbelessRank(s.data.train);
  nr::InterventionSetup setup;
  setup.ks = {0, 2, 4, 8, 16};
  setup.means = &s.means;
  const auto top = nr::RunIntervention(s.decoder, s.data.test, ttb, setup, s.analyzer);
  CHECK(top.error_rate[0] == 0.0);
  CHECK(top.clwv[0] == 0.0);
  CHECK(top.error_rate[3] >= 0.5);
  CHECK(top.clwv[3] >= 0.3);
  for (std::size_t i = 0; i < top.ks.size(); ++i) CHECK(top.clwv[i] <= top.error_rate[i]);

  const auto bottom = nr::RunIntervention(s.decoder, s.data.test, nr::Reverse(ttb), setup, s.analyzer);
  CHECK(bottom.error_rate[3] <= 0.05);

  setup.threads = 3;
  const auto threaded = nr::RunIntervention(s.decoder, s.data.test, ttb, setup, s.analyzer);
  CHECK(threaded.error_rate == top.error_rate);

  // Ablating every neuron the decoder ignores changes nothing.
  nr::Ranking unread;
  const auto read = s.data.corpus.truth.AllPlanted();
  for (nr::NeuronIndex j = 0; j < 64; ++j) {
    if (std::find(read.begin(), read.end(), j) == read.end()) unread.order.push_back(j);
  }
  const auto n_unread = unread.order.size();
  unread.order.insert(unread.order.end(), read.begin(), read.end());
  nr::InterventionSetup ablate;
  ablate.method = nr::InterventionMethod::kAblation;
  ablate.ks = {n_unread};
  const auto ab = nr::RunIntervention(s.decoder, s.data.test, unread, ablate, s.analyzer);
  CHECK(ab.error_rate[0] == 0.0);
  CHECK(ab.beta == 0.0);

  setup.beta = 0.0;
  const auto noop = nr::RunIntervention(s.decoder, s.data.test, ttb, setup, s.analyzer);
  for (double e : noop.error_rate) CHECK(e == 0.0);
}

TEST_CASE("run_intervention errors") {
  auto s = MakeSetup(6);
  const auto r = nr::ProbelessRank(s.data.train);
  nr::InterventionSetup setup;
  setup.ks = {8};
  CHECK_THROWS_AS(nr::RunIntervention(s.decoder, s.data.test, r, setup, s.analyzer), nr::DataError);
  setup.means = &s.means;
  const nr::LexiconAnalyzer partial([] {
    nr::Lexicon lex;
    lex.Add("lem0.Pl", {"lem0", {{"Number", "Pl"}}});
    return lex;
  }());
  try {
    nr::RunIntervention(s.decoder, s.data.test, r, setup, partial);
    FAIL("expected LexiconError");
  } catch (const nr::LexiconError& e) {
    CHECK(std::string(e.what()).find("lem0.Sg") != std::string::npos);
  }
  setup.ks = {65};
  CHECK_THROWS_AS(nr::RunIntervention(s.decoder, s.data.test, r, setup, s.analyzer), nr::RangeError);
}
