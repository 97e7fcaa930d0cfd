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

// Probe classifiers over neuron subsets.
//
// LinearProbe is a multinomial logistic regression with an elastic-net
// penalty, trained by seeded mini-batch proximal gradient descent (the l2 term
// enters the gradient, the l1 term is applied as soft-thresholding).
//
// GaussianProbe is a generative classifier with one full-covariance Gaussian
// per class. Marginalizing it to a subset of neurons only slices the means and
// covariances, so one fit serves every subset.

#ifndef NEURONRANK_PROBES_HPP_
#define NEURONRANK_PROBES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "neuronrank/data.hpp"

namespace neuronrank {

struct LinearHyper {
  double l1 = 1e-5;
  double l2 = 1e-5;
  double learning_rate = 1e-3;
  std::size_t epochs = 10;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
};

struct LinearProbe {
  MatrixD weights;  // |Z| x k
  VectorD bias;     // |Z|
  NeuronSubset subset;
  std::vector<std::string> label_set;
  LinearHyper hyper;
  // Full-data penalized objective after each epoch.
  std::vector<double> epoch_loss;
};

struct Prediction {
  std::vector<int> predicted;
  double accuracy = 0.0;
};

// Checks every index is < dims and no index repeats; throws IndexError.
void CheckSubset(const NeuronSubset& subset, std::size_t dims);
NeuronSubset AllNeurons(std::size_t dims);

LinearProbe TrainLinear(const AttributeDataset& dataset,
                        const NeuronSubset& subset,
                        const LinearHyper& hyper = {});
Prediction PredictLinear(const LinearProbe& probe,
                         const AttributeDataset& dataset);
// Cross-entropy + elastic-net penalty of `probe` on `dataset`.
double LinearObjective(const LinearProbe& probe,
                       const AttributeDataset& dataset);

struct GaussianProbe {
  NeuronSubset neurons;  // original neuron index of each covered dimension
  MatrixD means;         // |Z| x k
  std::vector<MatrixD> covariances;  // ML estimate per class, k x k
  std::vector<double> ridge;         // per-class eps added to the diagonal
  VectorD log_priors;
  std::vector<std::string> label_set;

  std::size_t dims() const { return neurons.size(); }
  std::size_t num_classes() const { return label_set.size(); }
  // Covariance of class z with its ridge applied.
  MatrixD Regularized(std::size_t z) const;
};

// Ridge: 1e-4 * mean(diag(cov)), floored at 1e-8.
GaussianProbe FitGaussian(const AttributeDataset& dataset);
// `subset` holds original neuron indices covered by `probe`.
GaussianProbe MarginalizeGaussian(const GaussianProbe& probe,
                                  const NeuronSubset& subset);

struct GaussianPrediction {
  std::vector<int> predicted;
  double accuracy = 0.0;
  MatrixD posteriors;  // rows x |Z|
};

// Classifies with the marginal over `subset` in log space.
GaussianPrediction PredictGaussian(const GaussianProbe& probe,
                                   const AttributeDataset& dataset,
                                   const NeuronSubset& subset);

}  // namespace neuronrank

#endif  // NEURONRANK_PROBES_HPP_
