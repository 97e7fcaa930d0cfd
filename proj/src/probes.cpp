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

#include "neuronrank/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "neuronrank/error.hpp"

namespace neuronrank {
namespace {

MatrixD GatherColumns(const AttributeDataset& dataset, const NeuronSubset& subset) {
  const Matrix& x = dataset.reprs().values();
  MatrixD out(x.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t c = 0; c < subset.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) =
        x.col(static_cast<Eigen::Index>(subset[c])).cast<double>();
  }
  return out;
}

// Index of the largest entry; the first one wins ties.
int ArgMax(const Eigen::Ref<const VectorD>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

double Accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

void SoftmaxRowsInPlace(MatrixD& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - m).exp();
    logits.row(i) /= logits.row(i).sum();
  }
}

double ObjectiveOn(const MatrixD& w, const VectorD& b, const MatrixD& x,
                   const std::vector<int>& labels, const LinearHyper& h) {
  double ce = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    VectorD logits = w * x.row(i).transpose() + b;
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    ce += lse - logits[labels[static_cast<std::size_t>(i)]];
  }
  ce /= static_cast<double>(x.rows());
  return ce + h.l1 * w.cwiseAbs().sum() + h.l2 * w.squaredNorm();
}

}  // namespace

void CheckSubset(const NeuronSubset& subset, std::size_t dims) {
  std::vector<bool> seen(dims, false);
  for (auto j : subset) {
    if (j >= dims) {
      throw IndexError("neuron " + std::to_string(j) + " out of range (d=" +
                       std::to_string(dims) + ")");
    }
    if (seen[j]) throw IndexError("neuron " + std::to_string(j) + " repeated");
    seen[j] = true;
  }
}

NeuronSubset AllNeurons(std::size_t dims) {
  NeuronSubset all(dims);
  std::iota(all.begin(), all.end(), NeuronIndex{0});
  return all;
}

LinearProbe TrainLinear(const AttributeDataset& dataset, const NeuronSubset& subset,
                        const LinearHyper& hyper) {
  if (dataset.num_classes() < 2) {
    throw DegenerateTaskError("linear probe needs at least two classes");
  }
  if (subset.empty()) throw EmptySubsetError("linear probe on empty subset");
  CheckSubset(subset, dataset.dims());
  if (dataset.rows() == 0) throw EmptyDatasetError("linear probe on empty dataset");
  for (auto c : dataset.ClassCounts()) {
    if (c == 0) throw EmptyClassError("class missing from training split");
  }

  const MatrixD x = GatherColumns(dataset, subset);
  const auto& labels = dataset.labels();
  const auto n = static_cast<std::size_t>(x.rows());
  const auto classes = static_cast<Eigen::Index>(dataset.num_classes());
  const auto k = static_cast<Eigen::Index>(subset.size());
  const std::size_t batch = std::max<std::size_t>(1, std::min(hyper.batch_size, n));

  LinearProbe probe;
  probe.weights = MatrixD::Zero(classes, k);
  probe.bias = VectorD::Zero(classes);
  probe.subset = subset;
  probe.label_set = dataset.label_set();
  probe.hyper = hyper;

  std::mt19937_64 rng(hyper.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double shrink = hyper.learning_rate * hyper.l1;

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const auto m = static_cast<Eigen::Index>(end - start);
      MatrixD xb(m, k);
      for (Eigen::Index r = 0; r < m; ++r) xb.row(r) = x.row(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]));
      MatrixD p = (xb * probe.weights.transpose()).rowwise() + probe.bias.transpose();
      SoftmaxRowsInPlace(p);
      for (Eigen::Index r = 0; r < m; ++r) {
        p(r, labels[order[start + static_cast<std::size_t>(r)]]) -= 1.0;
      }
      const double inv = 1.0 / static_cast<double>(m);
      const MatrixD grad_w = inv * (p.transpose() * xb) + 2.0 * hyper.l2 * probe.weights;
      const VectorD grad_b = inv * p.colwise().sum().transpose();
      probe.weights -= hyper.learning_rate * grad_w;
      probe.bias -= hyper.learning_rate * grad_b;
      if (shrink > 0) {
        probe.weights = probe.weights.unaryExpr([shrink](double w) {
          return std::copysign(std::max(0.0, std::abs(w) - shrink), w);
        });
      }
    }
    probe.epoch_loss.push_back(ObjectiveOn(probe.weights, probe.bias, x, labels, hyper));
  }
  return probe;
}

double LinearObjective(const LinearProbe& probe, const AttributeDataset& dataset) {
  CheckSubset(probe.subset, dataset.dims());
  if (dataset.rows() == 0) throw EmptyDatasetError("objective on empty dataset");
  return ObjectiveOn(probe.weights, probe.bias, GatherColumns(dataset, probe.subset),
                     dataset.labels(), probe.hyper);
}

Prediction PredictLinear(const LinearProbe& probe, const AttributeDataset& dataset) {
  CheckSubset(probe.subset, dataset.dims());
  if (dataset.rows() == 0) throw EmptyDatasetError("prediction on empty dataset");
  if (dataset.label_set() != probe.label_set) {
    throw DataError("dataset and probe label sets differ");
  }
  const MatrixD x = GatherColumns(dataset, probe.subset);
  Prediction out;
  out.predicted.resize(dataset.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const VectorD scores = probe.weights * x.row(i).transpose() + probe.bias;
    out.predicted[static_cast<std::size_t>(i)] = ArgMax(scores);
  }
  out.accuracy = Accuracy(out.predicted, dataset.labels());
  return out;
}

MatrixD GaussianProbe::Regularized(std::size_t z) const {
  MatrixD c = covariances[z];
  c.diagonal().array() += ridge[z];
  return c;
}

GaussianProbe FitGaussian(const AttributeDataset& dataset) {
  const auto counts = dataset.ClassCounts();
  for (std::size_t z = 0; z < counts.size(); ++z) {
    if (counts[z] < 2) {
      throw InsufficientDataError("class '" + dataset.label_set()[z] + "' has " +
                                  std::to_string(counts[z]) + " rows, need 2");
    }
  }
  const auto d = static_cast<Eigen::Index>(dataset.dims());
  const MatrixD means = ClassMeans(dataset);
  GaussianProbe probe;
  probe.neurons = AllNeurons(dataset.dims());
  probe.means = means;
  probe.label_set = dataset.label_set();
  probe.covariances.assign(counts.size(), MatrixD::Zero(d, d));
  const Matrix& x = dataset.reprs().values();
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    const int z = dataset.labels()[i];
    const VectorD c = x.row(static_cast<Eigen::Index>(i)).cast<double>().transpose() -
                      means.row(z).transpose();
    probe.covariances[static_cast<std::size_t>(z)].selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  probe.log_priors.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t z = 0; z < counts.size(); ++z) {
    MatrixD& cov = probe.covariances[z];
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(counts[z]);
    const double mean_diag = d > 0 ? cov.diagonal().mean() : 0.0;
    probe.ridge.push_back(std::max(1e-4 * mean_diag, 1e-8));
    probe.log_priors[static_cast<Eigen::Index>(z)] =
        std::log(static_cast<double>(counts[z]) / static_cast<double>(dataset.rows()));
  }
  return probe;
}

GaussianProbe MarginalizeGaussian(const GaussianProbe& probe, const NeuronSubset& subset) {
  if (subset.empty()) throw EmptySubsetError("marginalizing to an empty subset");
  std::vector<Eigen::Index> pos;
  pos.reserve(subset.size());
  for (auto j : subset) {
    auto it = std::find(probe.neurons.begin(), probe.neurons.end(), j);
    if (it == probe.neurons.end()) {
      throw IndexError("neuron " + std::to_string(j) + " not covered by probe");
    }
    pos.push_back(it - probe.neurons.begin());
  }
  if (std::set<Eigen::Index>(pos.begin(), pos.end()).size() != pos.size()) {
    throw IndexError("repeated neuron in subset");
  }
  GaussianProbe out;
  out.neurons = subset;
  out.label_set = probe.label_set;
  out.log_priors = probe.log_priors;
  out.ridge = probe.ridge;
  out.means = probe.means(Eigen::all, pos);
  for (const auto& cov : probe.covariances) out.covariances.push_back(cov(pos, pos));
  return out;
}

GaussianPrediction PredictGaussian(const GaussianProbe& probe,
                                   const AttributeDataset& dataset,
                                   const NeuronSubset& subset) {
  CheckSubset(subset, dataset.dims());
  if (dataset.rows() == 0) throw EmptyDatasetError("prediction on empty dataset");
  if (dataset.label_set() != probe.label_set) {
    throw DataError("dataset and probe label sets differ");
  }
  const GaussianProbe marginal = MarginalizeGaussian(probe, subset);
  const MatrixD x = GatherColumns(dataset, subset);
  const auto classes = static_cast<Eigen::Index>(marginal.num_classes());
  const auto k = static_cast<double>(subset.size());
  MatrixD log_joint(x.rows(), classes);
  for (Eigen::Index z = 0; z < classes; ++z) {
    Eigen::LLT<MatrixD> llt(marginal.Regularized(static_cast<std::size_t>(z)));
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Cholesky failed for class '" +
                           marginal.label_set[static_cast<std::size_t>(z)] + "'");
    }
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    MatrixD centered = (x.rowwise() - marginal.means.row(z)).transpose();
    llt.matrixL().solveInPlace(centered);
    const VectorD maha = centered.colwise().squaredNorm().transpose();
    log_joint.col(z) = (-0.5 * (maha.array() + log_det + k * std::log(2.0 * std::numbers::pi))) +
                       marginal.log_priors[z];
  }
  GaussianPrediction out;
  out.posteriors.resize(x.rows(), classes);
  out.predicted.resize(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = log_joint.row(i).maxCoeff();
    const double lse = m + std::log((log_joint.row(i).array() - m).exp().sum());
    out.posteriors.row(i) = (log_joint.row(i).array() - lse).exp();
    out.predicted[static_cast<std::size_t>(i)] = ArgMax(log_joint.row(i).transpose());
  }
  out.accuracy = Accuracy(out.predicted, dataset.labels());
  return out;
}

}  // namespace neuronrank
