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

#include "neuronrank/interventions.hpp"

#include <cmath>
#include <limits>

#include "neuronrank/error.hpp"
#include "neuronrank/parallel.hpp"

namespace neuronrank {

ToyLinearDecoder::ToyLinearDecoder(MatrixD scores, VectorD bias,
                                   std::vector<std::string> vocabulary)
    : scores_(std::move(scores)), bias_(std::move(bias)), vocabulary_(std::move(vocabulary)) {
  if (scores_.rows() != bias_.size() ||
      static_cast<std::size_t>(scores_.rows()) != vocabulary_.size()) {
    throw DataError("decoder: scores, bias and vocabulary sizes differ");
  }
  if (vocabulary_.empty()) throw DataError("decoder: empty vocabulary");
  if (!scores_.allFinite() || !bias_.allFinite()) throw DataError("decoder: non-finite weights");
}

ToyLinearDecoder ToyLinearDecoder::NearestPrototype(const MatrixD& prototypes,
                                                    std::vector<std::string> vocabulary,
                                                    const NeuronSubset& read_dims) {
  CheckSubset(read_dims, static_cast<std::size_t>(prototypes.cols()));
  MatrixD scores = MatrixD::Zero(prototypes.rows(), prototypes.cols());
  VectorD bias = VectorD::Zero(prototypes.rows());
  for (auto j : read_dims) {
    const auto c = static_cast<Eigen::Index>(j);
    scores.col(c) = 2.0 * prototypes.col(c);
    bias -= prototypes.col(c).cwiseAbs2();
  }
  return ToyLinearDecoder(std::move(scores), std::move(bias), std::move(vocabulary));
}

std::size_t ToyLinearDecoder::Decode(std::span<const double> h) const {
  if (h.size() != dims()) throw DimMismatchError("decoder input has wrong dimension");
  const Eigen::Map<const VectorD> x(h.data(), static_cast<Eigen::Index>(h.size()));
  const VectorD s = scores_ * x + bias_;
  Eigen::Index best = 0;
  for (Eigen::Index v = 1; v < s.size(); ++v) {
    if (s[v] > s[best]) best = v;
  }
  return static_cast<std::size_t>(best);
}

std::string LexiconAnalyzer::Lemma(const std::string& token) const {
  return lexicon_.At(token).lemma;
}

std::optional<std::string> LexiconAnalyzer::Value(const std::string& token,
                                                  const std::string& attribute) const {
  const auto& feats = lexicon_.At(token).feats;
  auto it = feats.find(attribute);
  if (it == feats.end()) return std::nullopt;
  return it->second;
}

std::vector<double> Ablate(std::span<const double> h, const Ranking& ranking, std::size_t k) {
  if (ranking.dims() != h.size()) throw DimMismatchError("ranking and representation differ in d");
  if (k > h.size()) throw RangeError("k=" + std::to_string(k) + " exceeds d");
  std::vector<double> out(h.begin(), h.end());
  for (std::size_t p = 0; p < k; ++p) out[ranking.order[p]] = 0.0;
  return out;
}

std::vector<double> TranslationCoefficients(std::size_t d, double beta) {
  if (d < 2) throw RangeError("translation coefficients need d >= 2");
  if (beta < 0) throw RangeError("beta must be non-negative");
  std::vector<double> alpha(d);
  const double log_d = std::log(static_cast<double>(d));
  for (std::size_t p = 1; p <= d; ++p) {
    alpha[p - 1] = beta * std::log(static_cast<double>(d - p + 1)) / log_d;
  }
  alpha.front() = beta;
  alpha.back() = 0.0;
  return alpha;
}

TranslationParams MakeTranslationParams(std::size_t d, double beta) {
  return TranslationParams{beta, TranslationCoefficients(d, beta)};
}

std::vector<double> Translate(std::span<const double> h, const Ranking& ranking, std::size_t k,
                              const TranslationParams& params, const MatrixD& means, int from,
                              int to) {
  if (from == to) throw SameValueError("source and target values are the same");
  const std::size_t d = h.size();
  if (ranking.dims() != d || params.alpha.size() != d ||
      static_cast<std::size_t>(means.cols()) != d) {
    throw DimMismatchError("ranking, coefficients and means must share d");
  }
  if (k > d) throw RangeError("k=" + std::to_string(k) + " exceeds d");
  if (from < 0 || to < 0 || from >= means.rows() || to >= means.rows()) {
    throw IndexError("class index outside the means table");
  }
  std::vector<double> out(h.begin(), h.end());
  for (std::size_t p = 0; p < k; ++p) {
    const auto j = static_cast<Eigen::Index>(ranking.order[p]);
    out[ranking.order[p]] += params.alpha[p] * (means(to, j) - means(from, j));
  }
  return out;
}

std::string_view ToString(InterventionMethod m) {
  return m == InterventionMethod::kAblation ? "ablation" : "translation";
}

InterventionMethod ParseInterventionMethod(std::string_view s) {
  if (s == "ablation") return InterventionMethod::kAblation;
  if (s == "translation") return InterventionMethod::kTranslation;
  throw DataError("unknown intervention method '" + std::string(s) + "'");
}

double Clwv(const std::vector<std::string>& baseline, const std::vector<std::string>& modified,
            const MorphAnalyzer& analyzer, const std::string& attribute) {
  if (baseline.size() != modified.size()) throw DimMismatchError("token lists differ in length");
  if (baseline.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const std::string lemma_b = analyzer.Lemma(baseline[i]);
    const std::string lemma_m = analyzer.Lemma(modified[i]);
    if (lemma_b == lemma_m &&
        analyzer.Value(baseline[i], attribute) != analyzer.Value(modified[i], attribute)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(baseline.size());
}

Saturation SaturationPoint(const std::vector<double>& values) {
  if (values.size() < 3) throw RangeError("saturation needs at least three points");
  auto ratio = [](double prev, double next) {
    if (prev == 0.0) return next == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return next / prev;
  };
  for (std::size_t i = 0; i + 2 < values.size(); ++i) {
    if (ratio(values[i], values[i + 1]) < 1.05 && ratio(values[i + 1], values[i + 2]) < 1.05) {
      return Saturation{i, values[i], true};
    }
  }
  return Saturation{values.size() - 1, values.back(), false};
}

InterventionReport RunIntervention(const Decoder& decoder, const AttributeDataset& dataset,
                                   const Ranking& ranking, const InterventionSetup& setup,
                                   const MorphAnalyzer& analyzer) {
  const std::size_t d = dataset.dims();
  if (decoder.dims() != d || ranking.dims() != d) {
    throw DimMismatchError("decoder, dataset and ranking must share d");
  }
  if (dataset.rows() == 0) throw EmptyDatasetError("intervention on empty dataset");
  for (const auto& token : decoder.vocabulary()) {
    if (!analyzer.Knows(token)) throw LexiconError("decoder token '" + token + "' not in lexicon");
  }
  for (std::size_t k : setup.ks) {
    if (k > d) throw RangeError("k=" + std::to_string(k) + " exceeds d");
  }
  TranslationParams params;
  if (setup.method == InterventionMethod::kTranslation) {
    if (setup.means == nullptr) throw DataError("translation needs class means");
    if (static_cast<std::size_t>(setup.means->rows()) != dataset.num_classes()) {
      throw DimMismatchError("class means do not match the label set");
    }
    if (dataset.num_classes() < 2) throw DegenerateTaskError("translation needs two values");
    params = MakeTranslationParams(d, setup.beta);
  }

  const std::size_t n = dataset.rows();
  const auto classes = static_cast<int>(dataset.num_classes());
  const auto& vocab = decoder.vocabulary();
  std::vector<std::vector<double>> rows(n);
  std::vector<std::string> baseline(n);
  ParallelFor(n, setup.threads, [&](std::size_t i) {
    auto r = dataset.reprs().row(i);
    rows[i].assign(r.begin(), r.end());
    baseline[i] = vocab[decoder.Decode(rows[i])];
  });
  bool words_known = true;
  for (const auto& w : dataset.reprs().surfaces()) words_known = words_known && analyzer.Knows(w);

  InterventionReport report;
  report.method = setup.method;
  report.ranking = ranking.Label();
  report.beta = setup.method == InterventionMethod::kTranslation ? setup.beta : 0.0;
  report.ks = setup.ks;
  for (std::size_t k : setup.ks) {
    std::vector<std::string> modified(n);
    ParallelFor(n, setup.threads, [&](std::size_t i) {
      const int z = dataset.labels()[i];
      const auto h = setup.method == InterventionMethod::kAblation
                         ? Ablate(rows[i], ranking, k)
                         : Translate(rows[i], ranking, k, params, *setup.means, z,
                                     (z + 1) % classes);
      modified[i] = vocab[decoder.Decode(h)];
    });
    std::size_t changed = 0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
      changed += modified[i] != baseline[i];
      wrong += modified[i] != dataset.reprs().surfaces()[i];
    }
    report.error_rate.push_back(static_cast<double>(changed) / static_cast<double>(n));
    report.error_rate_vs_word.push_back(static_cast<double>(wrong) / static_cast<double>(n));
    report.clwv.push_back(Clwv(baseline, modified, analyzer, dataset.attribute()));
    report.clwv_vs_word.push_back(
        words_known ? Clwv(dataset.reprs().surfaces(), modified, analyzer, dataset.attribute())
                    : std::numeric_limits<double>::quiet_NaN());
  }
  if (report.clwv.size() >= 3) report.saturation = SaturationPoint(report.clwv);
  return report;
}

}  // namespace neuronrank
