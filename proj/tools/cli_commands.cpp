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

#include "cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include "neuronrank/data.hpp"
#include "neuronrank/error.hpp"
#include "neuronrank/interventions.hpp"
#include "neuronrank/io.hpp"
#include "neuronrank/overlap.hpp"
#include "neuronrank/probing_eval.hpp"
#include "neuronrank/rankings.hpp"
#include "neuronrank/synth.hpp"

namespace fs = std::filesystem;

namespace neuronrank::cli {
namespace {

void Note(const std::string& command, const std::string& message) {
  std::cerr << "neuronrank " << command << ": " << message << "\n";
}

void Wrote(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

std::string Describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(err->kind()) + ": " + err->what();
  }
  return e.what();
}

fs::path OutDir(const Common& common) {
  fs::path out(common.out);
  fs::create_directories(out);
  return out;
}

struct Splits {
  AttributeDataset train;
  AttributeDataset dev;
  AttributeDataset test;
};

AttributeDataset LoadSplit(const fs::path& dir, const std::string& name,
                           const std::string& attribute) {
  const auto table = ReadAnnotations(dir / (name + ".tsv"));
  const auto reprs = AttachTokens(ReadReprFile(dir / (name + ".nrt")), table);
  return AlignAnnotations(reprs, table, attribute);
}

// Dev and test are mapped onto the training label set.
Splits LoadSplits(const fs::path& dir, const std::string& attribute) {
  if (attribute.empty()) throw DataError("--attribute is required");
  Splits s{LoadSplit(dir, "train", attribute), LoadSplit(dir, "dev", attribute),
           LoadSplit(dir, "test", attribute)};
  s.dev = s.dev.WithLabelSet(s.train.label_set());
  s.test = s.test.WithLabelSet(s.train.label_set());
  return s;
}

ExperimentConfig ConfigFor(const DataArgs& a, const fs::path& dir) {
  ExperimentConfig c;
  auto name = fs::absolute(dir).lexically_normal();
  if (!name.has_filename()) name = name.parent_path();
  c.corpus = a.corpus.empty() ? name.filename().string() : a.corpus;
  c.attribute = a.attribute;
  c.layer = a.layer;
  return c;
}

// Expands directories into their *.json files, sorted by name.
std::vector<fs::path> RankingFiles(const std::vector<std::string>& entries) {
  std::vector<fs::path> files;
  for (const auto& e : entries) {
    if (fs::is_directory(e)) {
      std::vector<fs::path> found;
      for (const auto& f : fs::directory_iterator(e)) {
        if (f.path().extension() == ".json") found.push_back(f.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(e);
    }
  }
  if (files.empty()) throw IoError("no ranking files given");
  return files;
}

std::vector<std::string> Numbers(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(FormatNumber(x));
  return out;
}

std::vector<std::size_t> SortedUnique(std::vector<std::size_t> ks) {
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

// 10, 50 and 150 of 768 neurons, scaled to d.
std::vector<std::size_t> SignificanceKs(std::size_t d) {
  std::vector<std::size_t> ks;
  for (double k : {10.0, 50.0, 150.0}) {
    ks.push_back(std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(k * static_cast<double>(d) / 768.0)), 1, d));
  }
  return SortedUnique(ks);
}

std::vector<ProbeKind> ProbeKinds(const std::string& probe) {
  if (probe == "both") return {ProbeKind::kLinear, ProbeKind::kGaussian};
  return {ParseProbeKind(probe)};
}

}  // namespace

int RunSynth(const SynthArgs& args) {
  auto spec = ReadSynthSpec(args.spec);
  if (args.common.seed_given) spec.seed = args.common.seed;
  const auto corpus = SynthGenerate(spec);
  const auto splits = SplitCorpus(corpus.reprs, corpus.annotations, args.train_fraction,
                                  args.dev_fraction);
  const auto out = OutDir(args.common);
  const char* names[] = {"train", "dev", "test"};
  for (std::size_t s = 0; s < splits.size(); ++s) {
    WriteReprFile(splits[s].reprs, out / (std::string(names[s]) + ".nrt"));
    WriteAnnotations(splits[s].annotations, out / (std::string(names[s]) + ".tsv"));
    Wrote(out / (std::string(names[s]) + ".nrt"));
  }
  WriteLexicon(corpus.lexicon, out / "lexicon.tsv");
  WriteJson(ToJson(corpus.truth), out / "truth.json");
  const auto decoder = ToyLinearDecoder::NearestPrototype(
      corpus.truth.prototypes, corpus.truth.vocab_surfaces, corpus.truth.AllPlanted());
  WriteJson(ToJson(decoder), out / "decoder.json");
  WriteText(FormatSynthSpec(spec), out / "spec.synth");
  for (const char* f : {"lexicon.tsv", "truth.json", "decoder.json", "spec.synth"}) Wrote(out / f);
  return 0;
}

int RunRank(const RankArgs& args) {
  const fs::path dir(args.data);
  const auto data = LoadSplits(dir, args.data_args.attribute);
  const auto config = ConfigFor(args.data_args, dir);
  const std::size_t d = data.train.dims();
  const auto out = OutDir(args.common);

  std::vector<RankMethod> methods;
  if (args.method == "all") {
    methods = {RankMethod::kProbeless, RankMethod::kLinear, RankMethod::kGaussian};
  } else {
    const auto m = ParseRankMethod(args.method);
    if (m != RankMethod::kRandom) methods.push_back(m);
  }

  int failed = 0;
  auto write = [&](Ranking r, const std::string& stem) {
    r.config = config;
    WriteRanking(r, out / (stem + ".json"));
    Wrote(out / (stem + ".json"));
  };
  for (auto method : methods) {
    const std::string name(ToString(method));
    try {
      Ranking r;
      if (method == RankMethod::kProbeless) {
        r = ProbelessRank(data.train);
      } else if (method == RankMethod::kLinear) {
        auto hyper = args.hyper;
        hyper.seed = args.common.seed;
        r = LinearRank(TrainLinear(data.train, AllNeurons(d), hyper), d);
      } else {
        const auto g =
            GaussianGreedyRank(data.train, data.dev, std::min(args.k_max, d), args.common.threads);
        for (const auto& msg : g.diagnostics) Note("rank", "gaussian: " + msg);
        r = g.ranking;
      }
      write(r, name + ".ttb");
      write(Reverse(r), name + ".btt");
    } catch (const std::exception& e) {
      ++failed;
      Note("rank", name + " failed: " + Describe(e));
    }
  }
  write(RandomRank(d, args.common.seed), "random");
  return failed == 0 ? 0 : 1;
}

int RunProbe(const ProbeArgs& args) {
  if (args.data.empty()) throw DataError("--data is required");
  if (!args.rankings.empty() && args.rankings.size() != args.data.size()) {
    throw DataError("give one --rankings directory per --data directory");
  }
  const auto out = OutDir(args.common);
  const auto kinds = ProbeKinds(args.probe);

  struct ConfigResult {
    std::string name;
    std::size_t d = 0;
    std::map<std::string, AccuracyCurve> curves;  // "<probe>/<ranking label>"
  };
  std::vector<ConfigResult> results;
  std::set<std::string> names;
  int failed = 0;

  for (std::size_t c = 0; c < args.data.size(); ++c) {
    const fs::path dir(args.data[c]);
    ConfigResult res;
    DataArgs naming = args.data_args;
    if (args.data.size() > 1) naming.corpus.clear();
    res.name = ConfigFor(naming, dir).corpus;
    if (!names.insert(res.name).second) res.name += "_" + std::to_string(c);
    try {
      const auto data = LoadSplits(dir, args.data_args.attribute);
      res.d = data.train.dims();
      const auto control_train = MakeControl(data.train, args.control_seed);
      const auto control_dev = MakeControl(data.dev, args.control_seed);
      const auto control_test = MakeControl(data.test, args.control_seed);
      auto ks = args.ks.empty() ? DefaultKGrid(res.d) : args.ks;
      for (auto k : SignificanceKs(res.d)) ks.push_back(k);
      ks = SortedUnique(ks);

      const auto ranking_files =
          RankingFiles({args.rankings.empty() ? (dir / "rankings").string() : args.rankings[c]});
      const auto cdir = out / res.name;
      fs::create_directories(cdir);
      Json summary = Json::array();
      for (const auto& file : ranking_files) {
        const auto ranking = ReadRanking(file);
        for (auto kind : kinds) {
          auto task = TopKCurve({data.train, data.dev, data.test}, kind, ranking, ks, args.hyper);
          const auto control = TopKCurve({control_train, control_dev, control_test}, kind,
                                         ranking, ks, args.hyper);
          task.control_accuracies = control.accuracies;
          const auto sel = Selectivity(task, control);
          std::vector<std::vector<std::string>> rows;
          for (std::size_t i = 0; i < ks.size(); ++i) {
            rows.push_back({std::to_string(ks[i]), FormatNumber(task.accuracies[i]),
                            FormatNumber(control.accuracies[i]), FormatNumber(sel[i])});
          }
          const auto csv = cdir / ("curve_" + std::string(ToString(kind)) + "_" +
                                   file.stem().string() + ".csv");
          WriteCsv(csv, {"k", "accuracy", "control", "selectivity"}, rows);
          Wrote(csv);
          for (const auto& [k, msg] : task.failures) {
            Note("probe", res.name + " " + task.ranking + " k=" + std::to_string(k) + ": " + msg);
          }
          summary.push_back(ToJson(task));
          res.curves[std::string(ToString(kind)) + "/" + task.ranking] = std::move(task);
        }
      }
      WriteJson(summary, cdir / "curves.json");
      Wrote(cdir / "curves.json");
      results.push_back(std::move(res));
    } catch (const std::exception& e) {
      ++failed;
      Note("probe", res.name + " failed: " + Describe(e));
    }
  }
  if (results.empty()) return 1;

  // Significance across configs: one-sided (greater) Wilcoxon of the row
  // combination against the column combination, per k.
  const std::size_t d = results.front().d;
  bool same_layout = true;
  for (const auto& r : results) {
    same_layout = same_layout && r.d == d && r.curves.size() == results.front().curves.size();
    for (const auto& [key, curve] : results.front().curves) {
      same_layout = same_layout && r.curves.count(key) && r.curves.at(key).ks == curve.ks;
    }
  }
  if (!same_layout) {
    Note("probe", "configs differ in d or combinations; significance and clusters skipped");
    return 1;
  }
  const auto sig_ks = SignificanceKs(d);
  std::vector<std::string> combos;
  for (const auto& [key, curve] : results.front().curves) combos.push_back(key);
  auto at_k = [&](const AccuracyCurve& curve, std::size_t k) {
    const auto it = std::find(curve.ks.begin(), curve.ks.end(), k);
    return curve.accuracies[static_cast<std::size_t>(it - curve.ks.begin())];
  };
  std::vector<std::string> header = {"row", "column"};
  for (auto k : sig_ks) header.push_back("p_k" + std::to_string(k));
  std::vector<std::vector<std::string>> rows;
  for (const auto& a : combos) {
    for (const auto& b : combos) {
      if (a == b) continue;
      std::vector<std::string> row = {a, b};
      for (auto k : sig_ks) {
        std::vector<double> x, y;
        for (const auto& r : results) {
          x.push_back(at_k(r.curves.at(a), k));
          y.push_back(at_k(r.curves.at(b), k));
        }
        double p = std::nan("");
        try {
          p = WilcoxonSignedRank(x, y, Alternative::kGreater).p_value;
        } catch (const NoEffectError&) {
        }
        row.push_back(FormatNumber(p));
      }
      rows.push_back(std::move(row));
    }
  }
  WriteCsv(out / "significance.csv", header, rows);
  Wrote(out / "significance.csv");

  // Pattern clustering over the non-bottom-to-top combinations.
  std::vector<std::string> kept;
  for (const auto& c : combos) {
    if (!c.ends_with("/" + std::string(ToString(RankVariant::kBottomToTop)))) kept.push_back(c);
  }
  Json clusters{{"combinations", kept}, {"k", args.clusters}};
  std::vector<std::string> used;
  std::vector<std::vector<double>> pattern_rows;
  for (const auto& r : results) {
    std::vector<double> row;
    for (const auto& c : kept) {
      const auto& acc = r.curves.at(c).accuracies;
      row.insert(row.end(), acc.begin(), acc.end());
    }
    if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
      used.push_back(r.name);
      pattern_rows.push_back(std::move(row));
    }
  }
  clusters["configs"] = used;
  if (pattern_rows.size() < args.clusters || pattern_rows.empty() || pattern_rows[0].empty()) {
    clusters["skipped"] = "need at least " + std::to_string(args.clusters) +
                          " complete configs, have " + std::to_string(pattern_rows.size());
    Note("probe", clusters["skipped"].get<std::string>() + "; clustering skipped");
  } else {
    MatrixD m(static_cast<Eigen::Index>(pattern_rows.size()),
              static_cast<Eigen::Index>(pattern_rows[0].size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(i, j) = pattern_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    const auto cr = ClusterPatterns(m, args.clusters, args.common.seed);
    Json centroids = Json::array(), projection = Json::array();
    for (Eigen::Index i = 0; i < cr.centroids.rows(); ++i) {
      std::vector<double> row(cr.centroids.row(i).begin(), cr.centroids.row(i).end());
      centroids.push_back(row);
    }
    for (Eigen::Index i = 0; i < cr.projection.rows(); ++i) {
      projection.push_back({cr.projection(i, 0), cr.projection(i, 1)});
    }
    clusters["assignments"] = cr.assignments;
    clusters["centroids"] = centroids;
    clusters["inertia"] = cr.inertia;
    clusters["projection"] = projection;
  }
  WriteJson(clusters, out / "clusters.json");
  Wrote(out / "clusters.json");
  return failed == 0 ? 0 : 1;
}

int RunIntervene(const InterveneArgs& args) {
  const fs::path dir(args.data);
  const auto data = LoadSplits(dir, args.data_args.attribute);
  const std::size_t d = data.train.dims();
  const auto decoder =
      DecoderFromJson(ReadJson(args.decoder.empty() ? dir / "decoder.json" : fs::path(args.decoder)));
  const LexiconAnalyzer analyzer(ReadLexicon(dir / "lexicon.tsv"));
  const MatrixD means = ClassMeans(data.train);

  InterventionSetup setup;
  setup.method = ParseInterventionMethod(args.method);
  setup.beta = args.beta;
  setup.means = &means;
  setup.threads = args.common.threads;
  if (args.ks.empty()) {
    setup.ks = DefaultKGrid(d);
    setup.ks.insert(setup.ks.begin(), 0);
  } else {
    setup.ks = SortedUnique(args.ks);
  }

  const auto out = OutDir(args.common);
  std::vector<SvgSeries> series;
  int failed = 0;
  for (const auto& file : RankingFiles(args.rankings)) {
    try {
      const auto ranking = ReadRanking(file);
      const auto report = RunIntervention(decoder, data.test, ranking, setup, analyzer);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < report.ks.size(); ++i) {
        rows.push_back({std::to_string(report.ks[i]), FormatNumber(report.error_rate[i]),
                        FormatNumber(report.clwv[i]), FormatNumber(report.error_rate_vs_word[i]),
                        FormatNumber(report.clwv_vs_word[i])});
      }
      const std::string stem = file.stem().string();
      WriteCsv(out / ("intervene_" + stem + ".csv"),
               {"k", "error_rate", "clwv", "error_rate_vs_word", "clwv_vs_word"}, rows);
      WriteJson(ToJson(report), out / ("saturation_" + stem + ".json"));
      Wrote(out / ("intervene_" + stem + ".csv"));
      Wrote(out / ("saturation_" + stem + ".json"));
      std::vector<double> x(report.ks.begin(), report.ks.end());
      series.push_back({stem + " clwv", x, report.clwv, false});
      series.push_back({stem + " error", x, report.error_rate, true});
    } catch (const std::exception& e) {
      ++failed;
      Note("intervene", file.string() + " failed: " + Describe(e));
    }
  }
  if (!series.empty()) {
    WriteText(SvgLineChart(std::string(ToString(setup.method)) + " on " + args.data_args.attribute,
                           series),
              out / "intervene.svg");
    Wrote(out / "intervene.svg");
  }
  return failed == 0 ? 0 : 1;
}

int RunOverlap(const OverlapArgs& args) {
  const auto files = RankingFiles(args.rankings);
  std::vector<Ranking> rankings;
  std::vector<std::string> labels = args.labels;
  for (const auto& f : files) rankings.push_back(ReadRanking(f));
  if (labels.empty()) {
    for (const auto& f : files) labels.push_back(f.stem().string());
  }
  if (labels.size() != rankings.size()) throw DataError("one label per ranking file");
  if (args.m == 0) throw RangeError("--m must be at least 1");

  const auto matrix = ComputeOverlapMatrix(rankings, labels, args.m);
  const auto out = OutDir(args.common);
  std::vector<std::string> header = {"ranking"};
  header.insert(header.end(), labels.begin(), labels.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    std::vector<std::string> row = {labels[a]};
    for (auto c : matrix.counts[a]) row.push_back(std::to_string(c));
    rows.push_back(std::move(row));
  }
  WriteCsv(out / "overlap.csv", header, rows);
  WriteText(SvgOverlapGrid(matrix), out / "overlap.svg");

  const auto exact2 = ExpectedOverlapClosedExact(matrix.d, args.m, 2);
  Json expected{{"d", matrix.d},
                {"m", args.m},
                {"pairwise",
                 {{"expected", matrix.expected},
                  {"fraction", FormatFraction(exact2)},
                  {"decimal", FormatDecimal(exact2)}}}};
  const std::size_t i = rankings.size();
  Json all{{"rankings", i},
           {"observed", TopMOverlap(rankings, args.m)},
           {"expected", ExpectedOverlapClosed(matrix.d, args.m, i)}};
  try {
    const auto exact = ExpectedOverlapExact(matrix.d, args.m, i);
    all["fraction"] = FormatFraction(exact);
    all["decimal"] = FormatDecimal(exact);
  } catch (const BudgetError& e) {
    all["recurrence"] = std::string("skipped: ") + e.what();
  }
  expected["all"] = all;
  WriteJson(expected, out / "expected.json");
  for (const char* f : {"overlap.csv", "overlap.svg", "expected.json"}) Wrote(out / f);
  return 0;
}

int RunReport(const ReportArgs& args) {
  if (args.inputs.empty()) throw DataError("--in is required");
  const auto out = OutDir(args.common);
  // Group curve and intervention CSVs by their directory.
  std::map<fs::path, std::vector<fs::path>> groups;
  for (const auto& in : args.inputs) {
    if (!fs::is_directory(in)) throw IoError("not a directory: " + in);
    for (const auto& e : fs::recursive_directory_iterator(in)) {
      const auto name = e.path().filename().string();
      if (e.path().extension() == ".csv" &&
          (name.starts_with("curve_") || name.starts_with("intervene_"))) {
        groups[e.path().parent_path()].push_back(e.path());
      }
    }
  }
  Json summary = Json::array();
  std::set<std::string> used;
  for (auto& [dir, files] : groups) {
    std::sort(files.begin(), files.end());
    std::map<std::string, std::vector<SvgSeries>> charts;  // chart name -> series
    for (const auto& file : files) {
      std::vector<std::string> header;
      const auto rows = ReadCsv(file, &header);
      const auto stem = file.stem().string();
      const bool curve = stem.starts_with("curve_");
      std::string chart, series_name;
      if (curve) {
        const auto rest = stem.substr(6);
        const auto cut = rest.find('_');
        chart = "accuracy_" + rest.substr(0, cut);
        series_name = rest.substr(cut + 1);
      } else {
        chart = "clwv";
        series_name = stem.substr(10);
      }
      SvgSeries s{series_name, {}, {}, series_name.ends_with(".btt")};
      const std::size_t col = curve ? 1 : 2;
      for (const auto& row : rows) {
        s.x.push_back(std::stod(row.at(0)));
        s.y.push_back(std::stod(row.at(col)));
      }
      summary.push_back({{"file", file.string()},
                         {"series", series_name},
                         {"metric", header.at(col)},
                         {"k", s.x},
                         {"values", Numbers(s.y)}});
      charts[chart].push_back(std::move(s));
    }
    std::string prefix = dir.filename().string();
    if (prefix.empty() || !used.insert(prefix).second) prefix += std::to_string(used.size());
    for (const auto& [chart, series] : charts) {
      const auto path = out / (prefix + "_" + chart + ".svg");
      WriteText(SvgLineChart(prefix + " " + chart, series), path);
      Wrote(path);
    }
  }
  WriteJson(summary, out / "report.json");
  Wrote(out / "report.json");
  return 0;
}

}  // namespace neuronrank::cli
