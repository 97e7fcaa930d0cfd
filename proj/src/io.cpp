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

#include "neuronrank/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "neuronrank/error.hpp"

namespace neuronrank {
namespace {

Json MatrixToJson(const MatrixD& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixD MatrixFromJson(const Json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  MatrixD m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
      throw FormatError("ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

Json VectorToJson(const VectorD& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorD VectorFromJson(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VectorD>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json NumbersToJson(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) {
    if (std::isnan(x)) out.push_back(nullptr);
    else out.push_back(x);
  }
  return out;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Json ToJson(const Ranking& r) {
  return Json{{"method", ToString(r.method)},
              {"variant", ToString(r.variant)},
              {"seed", r.seed},
              {"config",
               {{"corpus", r.config.corpus},
                {"attribute", r.config.attribute},
                {"layer", r.config.layer}}},
              {"order", r.order}};
}

Ranking RankingFromJson(const Json& j) {
  try {
    Ranking r;
    r.method = ParseRankMethod(j.at("method").get<std::string>());
    r.variant = ParseRankVariant(j.at("variant").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    const Json& c = j.at("config");
    r.config = ExperimentConfig{c.at("corpus").get<std::string>(),
                                c.at("attribute").get<std::string>(),
                                c.at("layer").get<std::string>()};
    r.order = j.at("order").get<std::vector<NeuronIndex>>();
    if (!IsPermutation(r.order)) throw FormatError("ranking order is not a permutation");
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("ranking JSON: ") + e.what());
  } catch (const DataError& e) {
    throw FormatError(std::string("ranking JSON: ") + e.what());
  }
}

Ranking ReadRanking(const std::filesystem::path& path) { return RankingFromJson(ReadJson(path)); }

void WriteRanking(const Ranking& r, const std::filesystem::path& path) {
  WriteJson(ToJson(r), path);
}

Json ToJson(const LinearProbe& p) {
  return Json{{"kind", "linear"},
              {"weights", MatrixToJson(p.weights)},
              {"bias", VectorToJson(p.bias)},
              {"subset", p.subset},
              {"label_set", p.label_set},
              {"hyper",
               {{"l1", p.hyper.l1},
                {"l2", p.hyper.l2},
                {"learning_rate", p.hyper.learning_rate},
                {"epochs", p.hyper.epochs},
                {"batch_size", p.hyper.batch_size},
                {"seed", p.hyper.seed}}},
              {"epoch_loss", p.epoch_loss}};
}

LinearProbe LinearProbeFromJson(const Json& j) {
  try {
    LinearProbe p;
    p.subset = j.at("subset").get<NeuronSubset>();
    p.weights = MatrixFromJson(j.at("weights"), static_cast<Eigen::Index>(p.subset.size()));
    p.bias = VectorFromJson(j.at("bias"));
    p.label_set = j.at("label_set").get<std::vector<std::string>>();
    const Json& h = j.at("hyper");
    p.hyper = LinearHyper{h.at("l1").get<double>(),         h.at("l2").get<double>(),
                          h.at("learning_rate").get<double>(), h.at("epochs").get<std::size_t>(),
                          h.at("batch_size").get<std::size_t>(), h.at("seed").get<std::uint64_t>()};
    p.epoch_loss = j.value("epoch_loss", std::vector<double>{});
    if (static_cast<std::size_t>(p.weights.cols()) != p.subset.size() ||
        p.weights.rows() != p.bias.size() ||
        static_cast<std::size_t>(p.bias.size()) != p.label_set.size()) {
      throw FormatError("linear probe JSON: inconsistent shapes");
    }
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("linear probe JSON: ") + e.what());
  }
}

Json ToJson(const GaussianProbe& p) {
  Json covs = Json::array();
  for (const auto& c : p.covariances) covs.push_back(MatrixToJson(c));
  return Json{{"kind", "gaussian"},
              {"neurons", p.neurons},
              {"means", MatrixToJson(p.means)},
              {"covariances", covs},
              {"ridge", p.ridge},
              {"log_priors", VectorToJson(p.log_priors)},
              {"label_set", p.label_set}};
}

GaussianProbe GaussianProbeFromJson(const Json& j) {
  try {
    GaussianProbe p;
    p.neurons = j.at("neurons").get<NeuronSubset>();
    const auto k = static_cast<Eigen::Index>(p.neurons.size());
    p.means = MatrixFromJson(j.at("means"), k);
    for (const auto& c : j.at("covariances")) p.covariances.push_back(MatrixFromJson(c, k));
    p.ridge = j.at("ridge").get<std::vector<double>>();
    p.log_priors = VectorFromJson(j.at("log_priors"));
    p.label_set = j.at("label_set").get<std::vector<std::string>>();
    const auto classes = p.label_set.size();
    if (static_cast<std::size_t>(p.means.rows()) != classes || p.covariances.size() != classes ||
        p.ridge.size() != classes || static_cast<std::size_t>(p.log_priors.size()) != classes) {
      throw FormatError("gaussian probe JSON: inconsistent class counts");
    }
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("gaussian probe JSON: ") + e.what());
  }
}

Json ToJson(const ToyLinearDecoder& d) {
  return Json{{"kind", "toy-linear"},
              {"vocabulary", d.vocabulary()},
              {"scores", MatrixToJson(d.scores())},
              {"bias", VectorToJson(d.bias())}};
}

ToyLinearDecoder DecoderFromJson(const Json& j) {
  try {
    return ToyLinearDecoder(MatrixFromJson(j.at("scores")), VectorFromJson(j.at("bias")),
                            j.at("vocabulary").get<std::vector<std::string>>());
  } catch (const Json::exception& e) {
    throw FormatError(std::string("decoder JSON: ") + e.what());
  }
}

Json ToJson(const SynthTruth& t) {
  return Json{{"planted", t.planted},
              {"magnitudes", t.magnitudes},
              {"lemma_neurons", t.lemma_neurons},
              {"all_planted", t.AllPlanted()},
              {"vocabulary", t.vocab_surfaces},
              {"prototypes", MatrixToJson(t.prototypes)}};
}

Json ToJson(const AccuracyCurve& c) {
  Json failures = Json::array();
  for (const auto& [k, msg] : c.failures) failures.push_back({{"k", k}, {"error", msg}});
  Json j{{"config",
          {{"corpus", c.config.corpus}, {"attribute", c.config.attribute}, {"layer", c.config.layer}}},
         {"probe", ToString(c.probe)},
         {"ranking", c.ranking},
         {"ks", c.ks},
         {"accuracies", NumbersToJson(c.accuracies)},
         {"failures", failures}};
  if (c.control_accuracies) j["control_accuracies"] = NumbersToJson(*c.control_accuracies);
  return j;
}

Json ToJson(const InterventionReport& r) {
  Json sat{{"index", r.saturation.index},
           {"value", r.saturation.value},
           {"saturated", r.saturation.saturated}};
  if (!r.ks.empty() && r.saturation.index < r.ks.size()) {
    sat["neurons"] = r.ks[r.saturation.index];
    sat["error_rate"] = r.error_rate[r.saturation.index];
  }
  return Json{{"method", ToString(r.method)},
              {"ranking", r.ranking},
              {"beta", r.beta},
              {"ks", r.ks},
              {"error_rate", NumbersToJson(r.error_rate)},
              {"clwv", NumbersToJson(r.clwv)},
              {"error_rate_vs_word", NumbersToJson(r.error_rate_vs_word)},
              {"clwv_vs_word", NumbersToJson(r.clwv_vs_word)},
              {"saturation", sat}};
}

Json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteJson(const Json& j, const std::filesystem::path& path) {
  WriteText(j.dump(2) + "\n", path);
}

void WriteText(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void WriteCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\"\n") != std::string::npos) {
        throw FormatError("CSV cell needs quoting: " + cells[i]);
      }
      out << (i ? "," : "") << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  WriteText(out.str(), path);
}

std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path,
                                              std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      if (header) *header = cells;
      first = false;
    } else {
      rows.push_back(std::move(cells));
    }
  }
  return rows;
}

std::string SvgLineChart(const std::string& title, const std::vector<SvgSeries>& series) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 160, kTop = 40, kBottom = 50;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = 0.0, y_max = 1.0;
  for (const auto& s : series) {
    for (double x : s.x) x_min = std::min(x_min, x), x_max = std::max(x_max, x);
    for (double y : s.y) {
      if (std::isfinite(y)) y_min = std::min(y_min, y), y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1;
  if (x_max == x_min) x_max = x_min + 1;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << XmlEscape(title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = y_min + (y_max - y_min) * t / 4.0;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
        << FormatNumber(std::round(y * 100) / 100) << "</text>\n";
    const double x = x_min + (x_max - x_min) * t / 4.0;
    out << "<text x=\"" << px(x) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
        << FormatNumber(std::round(x * 10) / 10) << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t p = 0; p < std::min(s.x.size(), s.y.size()); ++p) {
      if (std::isfinite(s.y[p])) out << px(s.x[p]) << "," << py(s.y[p]) << " ";
    }
    out << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(i) + 8;
    out << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\""
        << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n"
        << "<text x=\"" << kW - kRight + 34 << "\" y=\"" << ly + 4 << "\">" << XmlEscape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string SvgOverlapGrid(const OverlapMatrix& matrix) {
  const std::size_t n = matrix.counts.size();
  constexpr double kCell = 24, kMargin = 140;
  const double size = kMargin + kCell * static_cast<double>(n) + 20;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"4\" y=\"14\">top-" << matrix.m << " overlap, expected "
      << FormatNumber(std::round(matrix.expected * 100) / 100) << "</text>\n";
  for (std::size_t a = 0; a < n; ++a) {
    const double y = kMargin + kCell * static_cast<double>(a);
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << y + kCell * 0.65
        << "\" text-anchor=\"end\">" << XmlEscape(matrix.labels[a]) << "</text>\n";
    for (std::size_t b = 0; b < n; ++b) {
      const double x = kMargin + kCell * static_cast<double>(b);
      const char* fill = a == b ? "#bbbbbb" : (matrix.AboveExpected(a, b) ? "#3b6fd4" : "#d44b3b");
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"" << fill << "\" stroke=\"white\"/>"
          << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell * 0.65
          << "\" text-anchor=\"middle\" fill=\"white\">" << matrix.counts[a][b] << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace neuronrank
