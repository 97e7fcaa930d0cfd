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

// Causal evaluation of rankings: modify the top-k neurons of a representation,
// decode it, and measure how the decoded word changes.
//
// Errors are counted against the decoder's own prediction on the unmodified
// representation, D(h). The same quantities measured against the corpus word
// are reported alongside as *_vs_word.

#ifndef NEURONRANK_INTERVENTIONS_HPP_
#define NEURONRANK_INTERVENTIONS_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "neuronrank/data.hpp"
#include "neuronrank/rankings.hpp"

namespace neuronrank {

// The model tail: representation -> vocabulary index. Implementations must
// be deterministic and safe for concurrent const use.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual std::size_t Decode(std::span<const double> h) const = 0;
  virtual const std::vector<std::string>& vocabulary() const = 0;
  virtual std::size_t dims() const = 0;
};

// argmax_v (scores[v] . h + bias[v]); the lowest token index wins ties.
class ToyLinearDecoder final : public Decoder {
 public:
  ToyLinearDecoder(MatrixD scores, VectorD bias, std::vector<std::string> vocabulary);

  // Nearest prototype in squared distance over `read_dims` only, written as a
  // linear decoder: scores[v, j] = 2 p_vj, bias[v] = -sum_j p_vj^2.
  static ToyLinearDecoder NearestPrototype(const MatrixD& prototypes,
                                           std::vector<std::string> vocabulary,
                                           const NeuronSubset& read_dims);

  std::size_t Decode(std::span<const double> h) const override;
  const std::vector<std::string>& vocabulary() const override { return vocabulary_; }
  std::size_t dims() const override { return static_cast<std::size_t>(scores_.cols()); }
  const MatrixD& scores() const { return scores_; }
  const VectorD& bias() const { return bias_; }

 private:
  MatrixD scores_;
  VectorD bias_;
  std::vector<std::string> vocabulary_;
};

// Lemma and attribute lookup for decoded words.
class MorphAnalyzer {
 public:
  virtual ~MorphAnalyzer() = default;
  virtual bool Knows(const std::string& token) const = 0;
  // Both throw LexiconError for unknown tokens.
  virtual std::string Lemma(const std::string& token) const = 0;
  virtual std::optional<std::string> Value(const std::string& token,
                                           const std::string& attribute) const = 0;
};

class LexiconAnalyzer final : public MorphAnalyzer {
 public:
  explicit LexiconAnalyzer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
  bool Knows(const std::string& token) const override { return lexicon_.Find(token) != nullptr; }
  std::string Lemma(const std::string& token) const override;
  std::optional<std::string> Value(const std::string& token,
                                   const std::string& attribute) const override;

 private:
  Lexicon lexicon_;
};

// h with the top-k ranked coordinates set to zero. Throws RangeError if k > d.
std::vector<double> Ablate(std::span<const double> h, const Ranking& ranking, std::size_t k);

// alpha at 1-based ranking position p is beta * log(d - p + 1) / log(d):
// beta at the top, 0 at the bottom, non-increasing in between.
std::vector<double> TranslationCoefficients(std::size_t d, double beta);

struct TranslationParams {
  double beta = 8.0;
  std::vector<double> alpha;  // indexed by ranking position
};
TranslationParams MakeTranslationParams(std::size_t d, double beta);

// Moves the top-k ranked coordinates of h, labeled `from`, towards class
// `to`: h_j += alpha[pos(j)] * (means[to, j] - means[from, j]).
std::vector<double> Translate(std::span<const double> h, const Ranking& ranking, std::size_t k,
                              const TranslationParams& params, const MatrixD& means, int from,
                              int to);

enum class InterventionMethod { kAblation, kTranslation };
std::string_view ToString(InterventionMethod m);
InterventionMethod ParseInterventionMethod(std::string_view s);

// Fraction of positions whose modified token keeps the baseline lemma but
// changes the attribute value.
double Clwv(const std::vector<std::string>& baseline, const std::vector<std::string>& modified,
            const MorphAnalyzer& analyzer, const std::string& attribute);

struct Saturation {
  std::size_t index = 0;
  double value = 0.0;
  bool saturated = false;
};

// First index i with values[i+1]/values[i] < 1.05 and
// values[i+2]/values[i+1] < 1.05 (0/0 = 1, x/0 = inf); the last index,
// unsaturated, if none qualifies. Throws RangeError below three values.
Saturation SaturationPoint(const std::vector<double>& values);

struct InterventionReport {
  InterventionMethod method = InterventionMethod::kTranslation;
  std::string ranking;
  double beta = 0.0;
  std::vector<std::size_t> ks;
  std::vector<double> error_rate;
  std::vector<double> clwv;
  std::vector<double> error_rate_vs_word;
  // NaN when some corpus word is unknown to the analyzer.
  std::vector<double> clwv_vs_word;
  Saturation saturation;  // of the clwv series, when it has >= 3 points
};

struct InterventionSetup {
  InterventionMethod method = InterventionMethod::kTranslation;
  std::vector<std::size_t> ks;
  double beta = 8.0;
  // |Z| x d class means from the training split; required for translation.
  const MatrixD* means = nullptr;
  std::size_t threads = 1;
};

// Rows of `dataset` are the test tokens that carry the attribute; each row
// labeled z is translated towards the cyclic successor of z in the label set.
InterventionReport RunIntervention(const Decoder& decoder, const AttributeDataset& dataset,
                                   const Ranking& ranking, const InterventionSetup& setup,
                                   const MorphAnalyzer& analyzer);

}  // namespace neuronrank

#endif  // NEURONRANK_INTERVENTIONS_HPP_
