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

#ifndef NEURONRANK_RANKINGS_HPP_
#define NEURONRANK_RANKINGS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neuronrank/data.hpp"
#include "neuronrank/probes.hpp"

namespace neuronrank {

enum class RankMethod { kProbeless, kLinear, kGaussian, kRandom };
enum class RankVariant { kTopToBottom, kBottomToTop };

std::string_view ToString(RankMethod m);
std::string_view ToString(RankVariant v);
RankMethod ParseRankMethod(std::string_view s);
RankVariant ParseRankVariant(std::string_view s);

// One experiment: (corpus/language, attribute, layer).
struct ExperimentConfig {
  std::string corpus;
  std::string attribute;
  std::string layer;

  bool operator==(const ExperimentConfig&) const = default;
};

struct Ranking {
  std::vector<NeuronIndex> order;  // position 0 = most important
  RankMethod method = RankMethod::kProbeless;
  RankVariant variant = RankVariant::kTopToBottom;
  std::uint64_t seed = 0;
  ExperimentConfig config;

  std::size_t dims() const { return order.size(); }
  // The first k neurons of `order`.
  NeuronSubset Top(std::size_t k) const;
  // e.g. "probeless/top-to-bottom".
  std::string Label() const;
  bool operator==(const Ranking&) const = default;
};

bool IsPermutation(const std::vector<NeuronIndex>& order);

// Indices sorted by descending score; equal scores keep ascending index.
std::vector<NeuronIndex> ArgSortDescending(const std::vector<double>& scores);

// r_j = sum over unordered class pairs of |q(z)_j - q(z')_j|.
std::vector<double> ProbelessScores(const AttributeDataset& dataset);
Ranking ProbelessRank(const AttributeDataset& dataset);

// Score of neuron j = mean over classes of |W[z, j]|.
std::vector<double> LinearScores(const LinearProbe& probe);
// The probe must cover every neuron in order 0..d-1.
Ranking LinearRank(const LinearProbe& probe, std::size_t dims);

struct GreedyResult {
  Ranking ranking;
  // Dev accuracy of the selected prefix after each greedy step.
  std::vector<double> step_accuracy;
  // Dev accuracy of every neuron on its own (-inf if its fit failed).
  std::vector<double> single_accuracy;
  std::vector<std::string> diagnostics;
};

// Forward selection over the marginals of one Gaussian fit on `train`,
// scored by accuracy on `dev`; equal accuracies go to the larger summed dev
// log-odds margin (true class against its best rival), then to the lower
// index. After `k_max` greedy steps the remaining
// neurons follow in order of single-neuron dev accuracy. `threads` > 1
// scores the candidates of a step concurrently.
GreedyResult GaussianGreedyRank(const AttributeDataset& train,
                                const AttributeDataset& dev, std::size_t k_max,
                                std::size_t threads = 1);

Ranking Reverse(const Ranking& ranking);
// Seeded Fisher-Yates shuffle of 0..d-1.
Ranking RandomRank(std::size_t d, std::uint64_t seed);

}  // namespace neuronrank

#endif  // NEURONRANK_RANKINGS_HPP_
