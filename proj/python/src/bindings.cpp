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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "neuronrank/data.hpp"
#include "neuronrank/error.hpp"
#include "neuronrank/interventions.hpp"
#include "neuronrank/io.hpp"
#include "neuronrank/overlap.hpp"
#include "neuronrank/probing_eval.hpp"
#include "neuronrank/rankings.hpp"
#include "neuronrank/synth.hpp"

namespace py = pybind11;
namespace nr = neuronrank;

namespace {

nr::LinearHyper Hyper(double l1, double l2, double lr, std::size_t epochs, std::size_t batch,
                      std::uint64_t seed) {
  nr::LinearHyper h;
  h.l1 = l1;
  h.l2 = l2;
  h.learning_rate = lr;
  h.epochs = epochs;
  h.batch_size = batch;
  h.seed = seed;
  return h;
}

#define HYPER_ARGS                                                                    \
  py::arg("l1") = 1e-5, py::arg("l2") = 1e-5, py::arg("lr") = 1e-3,                  \
      py::arg("epochs") = 10, py::arg("batch_size") = 256, py::arg("probe_seed") = 0

nr::AttributeDataset LoadDataset(const std::filesystem::path& nrt, const std::filesystem::path& tsv,
                                 const std::string& attribute) {
  const auto table = nr::ReadAnnotations(tsv);
  return nr::AlignAnnotations(nr::AttachTokens(nr::ReadReprFile(nrt), table), table, attribute);
}

nr::AttributeDataset FromArrays(const nr::Matrix& values, std::vector<int> labels,
                                std::vector<std::string> label_set,
                                std::vector<std::string> word_types, const std::string& attribute) {
  if (word_types.empty()) {
    for (std::size_t i = 0; i < labels.size(); ++i) word_types.push_back("w" + std::to_string(i));
  }
  return nr::AttributeDataset(nr::ReprSet::FromMatrix(values), attribute, std::move(labels),
                              std::move(label_set), std::move(word_types));
}

py::dict Paradigm(std::size_t d, std::size_t lemmas, nr::NeuronSubset planted,
                  nr::NeuronSubset lemma_neurons, double noise_sigma, std::size_t tokens,
                  std::uint64_t seed) {
  nr::ParadigmOptions o;
  o.d = d;
  o.lemmas = lemmas;
  o.planted = std::move(planted);
  o.lemma_neurons = std::move(lemma_neurons);
  o.noise_sigma = noise_sigma;
  o.tokens = tokens;
  o.seed = seed;
  const auto corpus = nr::SynthGenerate(nr::MakeParadigmSpec(o));
  const auto splits = nr::SplitCorpus(corpus.reprs, corpus.annotations, 0.6, 0.2);
  py::dict out;
  const char* names[] = {"train", "dev", "test"};
  for (std::size_t s = 0; s < 3; ++s) {
    out[names[s]] = nr::AlignAnnotations(splits[s].reprs, splits[s].annotations, o.attribute);
  }
  out["planted"] = corpus.truth.AllPlanted();
  return out;
}

py::dict CurveDict(const nr::AccuracyCurve& c) {
  py::dict d;
  d["probe"] = std::string(nr::ToString(c.probe));
  d["ranking"] = c.ranking;
  d["ks"] = c.ks;
  d["accuracies"] = c.accuracies;
  d["failures"] = c.failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_neuronrank, m) {
  m.doc() = "Neuron importance rankings, probing evaluation and interventions.";

  static py::exception<nr::Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const nr::Error& e) {
      py::set_error(error, (std::string(e.kind()) + ": " + e.what()).c_str());
    }
  });

  m.def("read_repr_file", [](const std::filesystem::path& p) { return nr::ReadReprFile(p).values(); },
        py::arg("path"));
  m.def("write_repr_file",
        [](const nr::Matrix& values, const std::filesystem::path& p) {
          nr::WriteReprFile(nr::ReprSet::FromMatrix(values), p);
        },
        py::arg("values"), py::arg("path"));

  py::class_<nr::AttributeDataset>(m, "AttributeDataset")
      .def_property_readonly("values",
                             [](const nr::AttributeDataset& d) { return d.reprs().values(); })
      .def_property_readonly("labels", &nr::AttributeDataset::labels)
      .def_property_readonly("label_set", &nr::AttributeDataset::label_set)
      .def_property_readonly("word_types", &nr::AttributeDataset::word_types)
      .def_property_readonly("attribute", &nr::AttributeDataset::attribute)
      .def_property_readonly("rows", &nr::AttributeDataset::rows)
      .def_property_readonly("dims", &nr::AttributeDataset::dims)
      .def("with_label_set", &nr::AttributeDataset::WithLabelSet, py::arg("label_set"));
  m.def("load_dataset", &LoadDataset, py::arg("nrt"), py::arg("tsv"), py::arg("attribute"));
  m.def("dataset_from_arrays", &FromArrays, py::arg("values"), py::arg("labels"),
        py::arg("label_set"), py::arg("word_types") = std::vector<std::string>{},
        py::arg("attribute") = "A");
  m.def("class_means", &nr::ClassMeans, py::arg("dataset"));
  m.def("paradigm", &Paradigm, py::arg("d") = 64, py::arg("lemmas") = 8,
        py::arg("planted") = nr::NeuronSubset{}, py::arg("lemma_neurons") = nr::NeuronSubset{},
        py::arg("noise_sigma") = 0.1, py::arg("tokens") = 2000, py::arg("seed") = 0);

  py::class_<nr::Ranking>(m, "Ranking")
      .def_readonly("order", &nr::Ranking::order)
      .def_readonly("seed", &nr::Ranking::seed)
      .def_property_readonly("method",
                             [](const nr::Ranking& r) { return std::string(nr::ToString(r.method)); })
      .def_property_readonly(
          "variant", [](const nr::Ranking& r) { return std::string(nr::ToString(r.variant)); })
      .def("top", &nr::Ranking::Top, py::arg("k"))
      .def("label", &nr::Ranking::Label)
      .def("__len__", &nr::Ranking::dims)
      .def("__eq__", [](const nr::Ranking& a, const nr::Ranking& b) { return a == b; });
  m.def("read_ranking", &nr::ReadRanking, py::arg("path"));
  m.def("write_ranking", &nr::WriteRanking, py::arg("ranking"), py::arg("path"));
  m.def("probeless_scores", &nr::ProbelessScores, py::arg("dataset"));
  m.def("probeless_rank", &nr::ProbelessRank, py::arg("dataset"));
  m.def("linear_rank",
        [](const nr::AttributeDataset& train, double l1, double l2, double lr, std::size_t epochs,
           std::size_t batch, std::uint64_t seed) {
          const auto probe = nr::TrainLinear(train, nr::AllNeurons(train.dims()),
                                             Hyper(l1, l2, lr, epochs, batch, seed));
          return nr::LinearRank(probe, train.dims());
        },
        py::arg("train"), HYPER_ARGS);
  m.def("gaussian_greedy_rank",
        [](const nr::AttributeDataset& train, const nr::AttributeDataset& dev, std::size_t k_max,
           std::size_t threads) {
          auto g = nr::GaussianGreedyRank(train, dev, k_max, threads);
          return py::make_tuple(g.ranking, g.step_accuracy);
        },
        py::arg("train"), py::arg("dev"), py::arg("k_max"), py::arg("threads") = 1);
  m.def("random_rank", &nr::RandomRank, py::arg("d"), py::arg("seed"));
  m.def("reverse", &nr::Reverse, py::arg("ranking"));

  m.def("default_k_grid", &nr::DefaultKGrid, py::arg("d"));
  m.def("topk_curve",
        [](const nr::AttributeDataset& train, const nr::AttributeDataset& dev,
           const nr::AttributeDataset& test, const std::string& probe, const nr::Ranking& ranking,
           const std::vector<std::size_t>& ks, double l1, double l2, double lr, std::size_t epochs,
           std::size_t batch, std::uint64_t seed) {
          return CurveDict(nr::TopKCurve({train, dev, test}, nr::ParseProbeKind(probe), ranking, ks,
                                         Hyper(l1, l2, lr, epochs, batch, seed)));
        },
        py::arg("train"), py::arg("dev"), py::arg("test"), py::arg("probe"), py::arg("ranking"),
        py::arg("ks"), HYPER_ARGS);
  m.def("make_control", &nr::MakeControl, py::arg("dataset"), py::arg("seed"));
  m.def("wilcoxon",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::string& alternative, const std::string& mode) {
          const auto alt = alternative == "greater" ? nr::Alternative::kGreater
                           : alternative == "less"  ? nr::Alternative::kLess
                                                    : nr::Alternative::kTwoSided;
          const auto md = mode == "exact"    ? nr::WilcoxonMode::kExact
                          : mode == "normal" ? nr::WilcoxonMode::kNormal
                                             : nr::WilcoxonMode::kAuto;
          const auto r = nr::WilcoxonSignedRank(x, y, alt, md);
          py::dict d;
          d["statistic"] = r.statistic;
          d["w_plus"] = r.w_plus;
          d["p_value"] = r.p_value;
          d["n"] = r.n;
          d["exact"] = r.exact;
          return d;
        },
        py::arg("x"), py::arg("y"), py::arg("alternative") = "two-sided",
        py::arg("mode") = "auto");

  m.def("topm_overlap", &nr::TopMOverlap, py::arg("rankings"), py::arg("m"));
  m.def("expected_overlap", &nr::ExpectedOverlapClosed, py::arg("n"), py::arg("m"), py::arg("i"));
  m.def("expected_overlap_exact",
        [](std::size_t n, std::size_t mm, std::size_t i) {
          return nr::FormatFraction(nr::ExpectedOverlapExact(n, mm, i));
        },
        py::arg("n"), py::arg("m"), py::arg("i"));
  m.def("expected_overlap_closed_exact",
        [](std::size_t n, std::size_t mm, std::size_t i) {
          return nr::FormatFraction(nr::ExpectedOverlapClosedExact(n, mm, i));
        },
        py::arg("n"), py::arg("m"), py::arg("i"));

  m.def("ablate",
        [](const std::vector<double>& h, const nr::Ranking& r, std::size_t k) {
          return nr::Ablate(h, r, k);
        },
        py::arg("h"), py::arg("ranking"), py::arg("k"));
  m.def("translation_coefficients", &nr::TranslationCoefficients, py::arg("d"), py::arg("beta"));
  m.def("saturation_point",
        [](const std::vector<double>& values) {
          const auto s = nr::SaturationPoint(values);
          return py::make_tuple(s.index, s.value, s.saturated);
        },
        py::arg("values"));
}
