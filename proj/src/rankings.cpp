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

#include "neuronrank/rankings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "neuronrank/error.hpp"
#include "neuronrank/parallel.hpp"

namespace neuronrank {

std::string_view ToString(RankMethod m) {
  switch (m) {
    case RankMethod::kProbeless: return "probeless";
    case RankMethod::kLinear: return "linear";
    case RankMethod::kGaussian: return "gaussian";
    case RankMethod::kRandom: return "random";
  }
  return "?";
}

std::string_view ToString(RankVariant v) {
  return v == RankVariant::kTopToBottom ? "top-to-bottom" : "bottom-to-top";
}

RankMethod ParseRankMethod(std::string_view s) {
  for (auto m : {RankMethod::kProbeless, RankMethod::kLinear, RankMethod::kGaussian,
                 RankMethod::kRandom}) {
    if (ToString(m) == s) return m;
  }
  throw DataError("unknown ranking method '" + std::string(s) + "'");
}

RankVariant ParseRankVariant(std::string_view s) {
  if (s == "top-to-bottom" || s == "ttb") return RankVariant::kTopToBottom;
  if (s == "bottom-to-top" || s == "btt") return RankVariant::kBottomToTop;
  throw DataError("unknown ranking variant '" + std::string(s) + "'");
}

NeuronSubset Ranking::Top(std::size_t k) const {
  if (k > order.size()) {
    throw RangeError("k=" + std::to_string(k) + " exceeds d=" + std::to_string(order.size()));
  }
  return NeuronSubset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
}

std::string Ranking::Label() const {
  return std::string(ToString(method)) + "/" + std::string(ToString(variant));
}

bool IsPermutation(const std::vector<NeuronIndex>& order) {
  std::vector<bool> seen(order.size(), false);
  for (auto j : order) {
    if (j >= order.size() || seen[j]) return false;
    seen[j] = true;
  }
  return true;
}

std::vector<NeuronIndex> ArgSortDescending(const std::vector<double>& scores) {
  std::vector<NeuronIndex> order(scores.size());
  std::iota(order.begin(), order.end(), NeuronIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NeuronIndex a, NeuronIndex b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<double> ProbelessScores(const AttributeDataset& dataset) {
  if (dataset.num_classes() < 2) {
    throw DegenerateTaskError("probeless ranking needs at least two classes");
  }
  const MatrixD q = ClassMeans(dataset);
  VectorD r = VectorD::Zero(q.cols());
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < q.rows(); ++b) {
      r += (q.row(a) - q.row(b)).cwiseAbs().transpose();
    }
  }
  return {r.data(), r.data() + r.size()};
}

Ranking ProbelessRank(const AttributeDataset& dataset) {
  Ranking r;
  r.order = ArgSortDescending(ProbelessScores(dataset));
  r.method = RankMethod::kProbeless;
  return r;
}

std::vector<double> LinearScores(const LinearProbe& probe) {
  const VectorD s = probe.weights.cwiseAbs().colwise().mean().transpose();
  return {s.data(), s.data() + s.size()};
}

Ranking LinearRank(const LinearProbe& probe, std::size_t dims) {
  if (probe.subset != AllNeurons(dims)) {
    throw SubsetMismatchError("linear ranking needs a probe trained on all " +
                              std::to_string(dims) + " neurons");
  }
  Ranking r;
  r.order = ArgSortDescending(LinearScores(probe));
  r.method = RankMethod::kLinear;
  return r;
}

namespace {

// Incremental per-class Cholesky state over the selected prefix S. For every
// class it keeps L (chol of the regularized covariance restricted to S), the
// whitened dev residuals L^{-1}(x_S - mu_S) and their squared norms.
class GreedyState {
 public:
  GreedyState(const GaussianProbe& probe, const AttributeDataset& dev)
      : probe_(probe), labels_(dev.labels()) {
    x_ = dev.reprs().values().cast<double>();
    const std::size_t classes = probe.num_classes();
    cov_.reserve(classes);
    for (std::size_t z = 0; z < classes; ++z) cov_.push_back(probe.Regularized(z));
    chol_.assign(classes, MatrixD(0, 0));
    whitened_.assign(classes, MatrixD(0, x_.rows()));
    maha_.assign(classes, VectorD::Zero(x_.rows()));
    log_det_.assign(classes, 0.0);
  }

  struct Extension {
    bool ok = false;
    std::size_t correct = 0;
    double margin = 0.0;            // summed dev log-odds of the true class vs the best rival
    std::vector<VectorD> row;       // per class: L^{-1} Sigma[S, j]
    std::vector<double> pivot;      // per class: new diagonal entry of L
    std::vector<VectorD> coord;     // per class: new whitened coordinate
  };

  // Scores S + {j}; `keep` retains what Commit needs.
  Extension Try(NeuronIndex j, bool keep) const {
    const std::size_t classes = cov_.size();
    const auto s = static_cast<Eigen::Index>(selected_.size());
    const auto n = x_.rows();
    Extension ext;
    MatrixD log_joint(n, static_cast<Eigen::Index>(classes));
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    for (std::size_t z = 0; z < classes; ++z) {
      const MatrixD& cov = cov_[z];
      VectorD c(s);
      for (Eigen::Index a = 0; a < s; ++a) {
        c[a] = cov(static_cast<Eigen::Index>(selected_[static_cast<std::size_t>(a)]),
                   static_cast<Eigen::Index>(j));
      }
      VectorD l = c;
      if (s > 0) chol_[z].triangularView<Eigen::Lower>().solveInPlace(l);
      const double pivot_sq = cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) -
                              l.squaredNorm();
      if (!(pivot_sq > 0.0) || !std::isfinite(pivot_sq)) return ext;
      const double pivot = std::sqrt(pivot_sq);
      const double mu = probe_.means(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(j));
      VectorD coord = x_.col(static_cast<Eigen::Index>(j)).array() - mu;
      if (s > 0) coord -= whitened_[z].transpose() * l;
      coord /= pivot;
      const double log_det = log_det_[z] + 2.0 * std::log(pivot);
      log_joint.col(static_cast<Eigen::Index>(z)) =
          -0.5 * ((maha_[z] + coord.cwiseAbs2()).array() + log_det +
                  static_cast<double>(s + 1) * log_2pi) +
          probe_.log_priors[static_cast<Eigen::Index>(z)];
      if (keep) {
        ext.row.push_back(std::move(l));
        ext.pivot.push_back(pivot);
        ext.coord.push_back(std::move(coord));
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index z = 1; z < log_joint.cols(); ++z) {
        if (log_joint(i, z) > log_joint(i, best)) best = z;
      }
      const int label = labels_[static_cast<std::size_t>(i)];
      ext.correct += best == label;
      double rival = -std::numeric_limits<double>::infinity();
      for (Eigen::Index z = 0; z < log_joint.cols(); ++z) {
        if (z != label) rival = std::max(rival, log_joint(i, z));
      }
      if (std::isfinite(rival)) ext.margin += log_joint(i, label) - rival;
    }
    ext.ok = true;
    return ext;
  }

  void Commit(NeuronIndex j, const Extension& ext) {
    const auto s = static_cast<Eigen::Index>(selected_.size());
    for (std::size_t z = 0; z < cov_.size(); ++z) {
      MatrixD grown = MatrixD::Zero(s + 1, s + 1);
      grown.topLeftCorner(s, s) = chol_[z];
      grown.block(s, 0, 1, s) = ext.row[z].transpose();
      grown(s, s) = ext.pivot[z];
      chol_[z] = std::move(grown);
      MatrixD w(s + 1, x_.rows());
      w.topRows(s) = whitened_[z];
      w.row(s) = ext.coord[z].transpose();
      whitened_[z] = std::move(w);
      maha_[z] += ext.coord[z].cwiseAbs2();
      log_det_[z] += 2.0 * std::log(ext.pivot[z]);
    }
    selected_.push_back(j);
  }

  std::size_t rows() const { return static_cast<std::size_t>(x_.rows()); }

 private:
  const GaussianProbe& probe_;
  const std::vector<int>& labels_;
  MatrixD x_;
  std::vector<MatrixD> cov_;
  std::vector<MatrixD> chol_;
  std::vector<MatrixD> whitened_;
  std::vector<VectorD> maha_;
  std::vector<double> log_det_;
  std::vector<NeuronIndex> selected_;
};

}  // namespace

GreedyResult GaussianGreedyRank(const AttributeDataset& train, const AttributeDataset& dev,
                                std::size_t k_max, std::size_t threads) {
  const std::size_t d = train.dims();
  if (dev.rows() == 0) throw EmptyDatasetError("greedy selection needs dev rows");
  if (dev.dims() != d) throw DimMismatchError("train and dev dims differ");
  if (k_max < 1 || k_max > d) {
    throw RangeError("k_max=" + std::to_string(k_max) + " outside [1, " + std::to_string(d) + "]");
  }
  const AttributeDataset dev_aligned =
      dev.label_set() == train.label_set() ? dev : dev.WithLabelSet(train.label_set());
  const GaussianProbe probe = FitGaussian(train);
  GreedyState state(probe, dev_aligned);
  const double n_dev = static_cast<double>(dev.rows());
  constexpr double kFailed = -std::numeric_limits<double>::infinity();

  GreedyResult result;
  result.single_accuracy.assign(d, kFailed);
  std::vector<bool> used(d, false);
  std::vector<NeuronIndex>& order = result.ranking.order;

  for (std::size_t step = 0; step < k_max; ++step) {
    std::vector<NeuronIndex> candidates;
    for (NeuronIndex j = 0; j < d; ++j) {
      if (!used[j]) candidates.push_back(j);
    }
    std::vector<long long> correct(candidates.size(), -1);
    std::vector<double> margin(candidates.size(), 0.0);
    ParallelFor(candidates.size(), threads, [&](std::size_t c) {
      const auto ext = state.Try(candidates[c], false);
      if (ext.ok) {
        correct[c] = static_cast<long long>(ext.correct);
        margin[c] = ext.margin;
      }
    });
    std::size_t best = candidates.size();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (correct[c] < 0) {
        result.diagnostics.push_back("step " + std::to_string(step + 1) + ": neuron " +
                                     std::to_string(candidates[c]) +
                                     " deferred (non-positive pivot)");
        continue;
      }
      if (step == 0) result.single_accuracy[candidates[c]] = static_cast<double>(correct[c]) / n_dev;
      // Equal accuracy falls to the summed log-odds margin, then to the lower index.
      if (best == candidates.size() || correct[c] > correct[best] ||
          (correct[c] == correct[best] && margin[c] > margin[best])) {
        best = c;
      }
    }
    if (best == candidates.size()) {
      result.diagnostics.push_back("step " + std::to_string(step + 1) +
                                   ": every candidate failed; filling the tail");
      break;
    }
    const NeuronIndex pick = candidates[best];
    state.Commit(pick, state.Try(pick, true));
    used[pick] = true;
    order.push_back(pick);
    result.step_accuracy.push_back(static_cast<double>(correct[best]) / n_dev);
  }

  for (NeuronIndex j : ArgSortDescending(result.single_accuracy)) {
    if (!used[j]) order.push_back(j);
  }
  result.ranking.method = RankMethod::kGaussian;
  return result;
}

Ranking Reverse(const Ranking& ranking) {
  Ranking r = ranking;
  std::reverse(r.order.begin(), r.order.end());
  r.variant = ranking.variant == RankVariant::kTopToBottom ? RankVariant::kBottomToTop
                                                           : RankVariant::kTopToBottom;
  return r;
}

Ranking RandomRank(std::size_t d, std::uint64_t seed) {
  if (d < 1) throw RangeError("random ranking needs d >= 1");
  Ranking r;
  r.order.resize(d);
  std::iota(r.order.begin(), r.order.end(), NeuronIndex{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = d - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(r.order[i], r.order[pick(rng)]);
  }
  r.method = RankMethod::kRandom;
  r.seed = seed;
  return r;
}

}  // namespace neuronrank
