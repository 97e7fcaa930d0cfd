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

// Evaluating rankings by probing: top-k accuracy curves, control tasks and
// selectivity, paired significance tests, and clustering of curve patterns.

#ifndef NEURONRANK_PROBING_EVAL_HPP_
#define NEURONRANK_PROBING_EVAL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neuronrank/data.hpp"
#include "neuronrank/probes.hpp"
#include "neuronrank/rankings.hpp"

namespace neuronrank {

enum class ProbeKind { kLinear, kGaussian };
std::string_view ToString(ProbeKind k);
ProbeKind ParseProbeKind(std::string_view s);

struct AccuracyCurve {
  ExperimentConfig config;
  ProbeKind probe = ProbeKind::kLinear;
  std::string ranking;  // Ranking::Label()
  std::vector<std::size_t> ks;
  std::vector<double> accuracies;
  std::optional<std::vector<double>> control_accuracies;
  // k values whose probe failed, with the error text; their accuracy is NaN.
  std::vector<std::pair<std::size_t, std::string>> failures;
};

// {10, 20, ..., 150} scaled by d / 768 (rounded, at least 1, deduplicated).
std::vector<std::size_t> DefaultKGrid(std::size_t d);

struct ProbeData {
  const AttributeDataset& train;
  const AttributeDataset& dev;  // unused by the linear probe
  const AttributeDataset& test;
};

// For each k, trains (linear) or fits and marginalizes (gaussian) a probe on
// the top-k neurons of `ranking` and records its test accuracy.
AccuracyCurve TopKCurve(const ProbeData& data, ProbeKind probe, const Ranking& ranking,
                        const std::vector<std::size_t>& ks, const LinearHyper& hyper = {});

// Control labels: every word type gets a label drawn uniformly from Z,
// a pure function of (word type, seed).
int ControlLabel(const std::string& word_type, std::size_t num_classes, std::uint64_t seed);
AttributeDataset MakeControl(const AttributeDataset& dataset, std::uint64_t seed);

// Per-k task accuracy minus control accuracy; throws GridMismatchError.
std::vector<double> Selectivity(const AccuracyCurve& task, const AccuracyCurve& control);

enum class Alternative { kGreater, kLess, kTwoSided };
// kAuto: exact for n <= 25, normal approximation above.
enum class WilcoxonMode { kAuto, kExact, kNormal };

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;       // non-zero differences
  bool exact = true;
};

// Paired signed-rank test of x - y. Exact null distribution for n <= 25,
// normal approximation with tie and continuity corrections above.
// Throws NoEffectError when every difference is zero.
WilcoxonResult WilcoxonSignedRank(const std::vector<double>& x, const std::vector<double>& y,
                                  Alternative alternative,
                                  WilcoxonMode mode = WilcoxonMode::kAuto);

struct ClusterResult {
  std::vector<int> assignments;
  MatrixD centroids;   // K x columns
  double inertia = 0.0;
  MatrixD projection;  // rows x 2, PCA of the input rows
  // Inertia at seeding, then after each Lloyd iteration of the best restart.
  std::vector<double> inertia_trace;
};

// Lloyd's K-means with k-means++ seeding; the best of `restarts` runs wins.
ClusterResult ClusterPatterns(const MatrixD& rows, std::size_t k, std::uint64_t seed,
                              std::size_t restarts = 50);

// Leading two principal-component scores of the centered rows.
MatrixD PcaProject2D(const MatrixD& rows);

}  // namespace neuronrank

#endif  // NEURONRANK_PROBING_EVAL_HPP_
