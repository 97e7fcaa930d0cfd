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

#include "neuronrank/probing_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "neuronrank/error.hpp"

namespace neuronrank {

std::string_view ToString(ProbeKind k) {
  return k == ProbeKind::kLinear ? "linear" : "gaussian";
}

ProbeKind ParseProbeKind(std::string_view s) {
  if (s == "linear") return ProbeKind::kLinear;
  if (s == "gaussian") return ProbeKind::kGaussian;
  throw DataError("unknown probe kind '" + std::string(s) + "'");
}

std::vector<std::size_t> DefaultKGrid(std::size_t d) {
  std::set<std::size_t> ks;
  for (std::size_t k = 10; k <= 150; k += 10) {
    const double scaled = static_cast<double>(k) * static_cast<double>(d) / 768.0;
    ks.insert(std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(scaled)), 1,
                                      std::max<std::size_t>(d, 1)));
  }
  return {ks.begin(), ks.end()};
}

AccuracyCurve TopKCurve(const ProbeData& data, ProbeKind probe, const Ranking& ranking,
                        const std::vector<std::size_t>& ks, const LinearHyper& hyper) {
  const std::size_t d = data.train.dims();
  if (data.test.dims() != d || ranking.dims() != d) {
    throw DimMismatchError("datasets and ranking must share d");
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || ks[i] > d) throw RangeError("k=" + std::to_string(ks[i]) + " outside [1, d]");
    if (i > 0 && ks[i] <= ks[i - 1]) throw RangeError("k grid must be strictly increasing");
  }
  const AttributeDataset test = data.test.label_set() == data.train.label_set()
                                    ? data.test
                                    : data.test.WithLabelSet(data.train.label_set());
  AccuracyCurve curve;
  curve.config = ranking.config;
  curve.probe = probe;
  curve.ranking = ranking.Label();
  curve.ks = ks;

  std::optional<GaussianProbe> gaussian;
  std::string gaussian_error;
  if (probe == ProbeKind::kGaussian) {
    try {
      gaussian = FitGaussian(data.train);
    } catch (const Error& e) {
      gaussian_error = std::string(e.kind()) + ": " + e.what();
    }
  }
  for (std::size_t k : ks) {
    const NeuronSubset subset = ranking.Top(k);
    if (probe == ProbeKind::kGaussian && !gaussian) {
      curve.accuracies.push_back(std::numeric_limits<double>::quiet_NaN());
      curve.failures.emplace_back(k, gaussian_error);
      continue;
    }
    try {
      double acc = 0.0;
      if (probe == ProbeKind::kLinear) {
        acc = PredictLinear(TrainLinear(data.train, subset, hyper), test).accuracy;
      } else {
        acc = PredictGaussian(*gaussian, test, subset).accuracy;
      }
      curve.accuracies.push_back(acc);
    } catch (const Error& e) {
      curve.accuracies.push_back(std::numeric_limits<double>::quiet_NaN());
      curve.failures.emplace_back(k, std::string(e.kind()) + ": " + e.what());
    }
  }
  return curve;
}

int ControlLabel(const std::string& word_type, std::size_t num_classes, std::uint64_t seed) {
  // FNV-1a over the bytes, then a splitmix64 finalizer mixed with the seed.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : word_type) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t x = h ^ (seed + 0x9E3779B97F4A7C15ULL);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return static_cast<int>((static_cast<unsigned __int128>(x) * num_classes) >> 64);
}

AttributeDataset MakeControl(const AttributeDataset& dataset, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(dataset.rows());
  for (const auto& type : dataset.word_types()) {
    labels.push_back(ControlLabel(type, dataset.num_classes(), seed));
  }
  return dataset.WithLabels(std::move(labels));
}

std::vector<double> Selectivity(const AccuracyCurve& task, const AccuracyCurve& control) {
  if (task.ks != control.ks) throw GridMismatchError("task and control curves use different ks");
  std::vector<double> out(task.ks.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = task.accuracies[i] - control.accuracies[i];
  }
  return out;
}

WilcoxonResult WilcoxonSignedRank(const std::vector<double>& x, const std::vector<double>& y,
                                  Alternative alternative, WilcoxonMode mode) {
  if (x.size() != y.size() || x.empty()) {
    throw RangeError("signed-rank test needs two non-empty samples of equal length");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dlt = x[i] - y[i];
    if (dlt != 0.0) diffs.push_back(dlt);
  }
  if (diffs.empty()) throw NoEffectError("all paired differences are zero");
  const std::size_t n = diffs.size();

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });
  // Doubled midranks keep every rank an integer.
  std::vector<long> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[idx[j + 1]]) == std::abs(diffs[idx[i]])) ++j;
    const long doubled = static_cast<long>(i + 1 + j + 1);  // 2 * midrank
    for (std::size_t t = i; t <= j; ++t) rank2[idx[t]] = doubled;
    const double ties = static_cast<double>(j - i + 1);
    tie_term += ties * ties * ties - ties;
    i = j + 1;
  }
  long w_plus2 = 0;
  long total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (diffs[i] > 0) w_plus2 += rank2[i];
  }

  WilcoxonResult res;
  res.n = n;
  res.w_plus = static_cast<double>(w_plus2) / 2.0;
  res.statistic = std::min(w_plus2, total2 - w_plus2) / 2.0;

  double p_greater = 0.0;
  double p_less = 0.0;
  const bool exact = mode == WilcoxonMode::kExact || (mode == WilcoxonMode::kAuto && n <= 25);
  if (exact) {
    // counts[s] = number of sign assignments with doubled W+ equal to s.
    std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (long s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] != 0.0) {
          counts[static_cast<std::size_t>(s + rank2[i])] += counts[static_cast<std::size_t>(s)];
        }
      }
      reach += rank2[i];
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double ge = 0.0;
    double le = 0.0;
    for (long s = 0; s <= total2; ++s) {
      if (s >= w_plus2) ge += counts[static_cast<std::size_t>(s)];
      if (s <= w_plus2) le += counts[static_cast<std::size_t>(s)];
    }
    p_greater = ge / all;
    p_less = le / all;
  } else {
    res.exact = false;
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double sd = std::sqrt(nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0);
    const double z_greater = (res.w_plus - mean - 0.5) / sd;
    const double z_less = (res.w_plus - mean + 0.5) / sd;
    p_greater = 0.5 * std::erfc(z_greater / std::sqrt(2.0));
    p_less = 0.5 * std::erfc(-z_less / std::sqrt(2.0));
  }
  switch (alternative) {
    case Alternative::kGreater: res.p_value = p_greater; break;
    case Alternative::kLess: res.p_value = p_less; break;
    case Alternative::kTwoSided: res.p_value = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
  }
  return res;
}

namespace {

VectorD Distances2(const MatrixD& rows, const MatrixD& centroids, std::vector<int>* nearest) {
  VectorD best(rows.rows());
  if (nearest) nearest->assign(static_cast<std::size_t>(rows.rows()), 0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double b = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double dist = (rows.row(i) - centroids.row(c)).squaredNorm();
      if (dist < b) {
        b = dist;
        arg = static_cast<int>(c);
      }
    }
    best[i] = b;
    if (nearest) (*nearest)[static_cast<std::size_t>(i)] = arg;
  }
  return best;
}

ClusterResult LloydOnce(const MatrixD& rows, std::size_t k, std::mt19937_64& rng) {
  const auto n = rows.rows();
  MatrixD centroids(static_cast<Eigen::Index>(k), rows.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = rows.row(first(rng));
  for (std::size_t c = 1; c < k; ++c) {
    const VectorD d2 = Distances2(rows, centroids.topRows(static_cast<Eigen::Index>(c)), nullptr);
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      std::discrete_distribution<Eigen::Index> weighted(d2.data(), d2.data() + n);
      pick = weighted(rng);
    } else {
      pick = first(rng);
    }
    centroids.row(static_cast<Eigen::Index>(c)) = rows.row(pick);
  }

  ClusterResult res;
  std::vector<int> assign;
  double inertia = Distances2(rows, centroids, &assign).sum();
  res.inertia_trace.push_back(inertia);
  for (int iter = 0; iter < 300; ++iter) {
    MatrixD sums = MatrixD::Zero(centroids.rows(), centroids.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += rows.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      // An emptied cluster keeps its previous centroid.
      if (counts[c] > 0) {
        centroids.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) /
                                                      static_cast<double>(counts[c]);
      }
    }
    std::vector<int> next;
    const double updated = Distances2(rows, centroids, &next).sum();
    res.inertia_trace.push_back(updated);
    const bool stable = next == assign;
    assign = std::move(next);
    inertia = updated;
    if (stable) break;
  }
  res.assignments = std::move(assign);
  res.centroids = std::move(centroids);
  res.inertia = inertia;
  return res;
}

}  // namespace

ClusterResult ClusterPatterns(const MatrixD& rows, std::size_t k, std::uint64_t seed,
                              std::size_t restarts) {
  if (k == 0 || k > static_cast<std::size_t>(rows.rows())) {
    throw ClusterError("K=" + std::to_string(k) + " with " + std::to_string(rows.rows()) + " rows");
  }
  std::mt19937_64 rng(seed);
  ClusterResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    ClusterResult run = LloydOnce(rows, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  best.projection = PcaProject2D(rows);
  return best;
}

MatrixD PcaProject2D(const MatrixD& rows) {
  MatrixD out = MatrixD::Zero(rows.rows(), 2);
  if (rows.rows() < 2 || rows.cols() == 0) return out;
  const MatrixD centered = rows.rowwise() - rows.colwise().mean();
  Eigen::BDCSVD<MatrixD> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto comps = std::min<Eigen::Index>(2, svd.singularValues().size());
  for (Eigen::Index c = 0; c < comps; ++c) {
    VectorD v = svd.matrixV().col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    out.col(c) = centered * v;
  }
  return out;
}

}  // namespace neuronrank
