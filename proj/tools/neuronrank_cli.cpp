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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli_commands.hpp"
#include "neuronrank/error.hpp"

namespace nc = neuronrank::cli;

namespace {

struct Sub {
  CLI::App* app = nullptr;
  nc::Common* common = nullptr;
};

Sub AddSub(CLI::App& root, const std::string& name, const std::string& help, nc::Common& common) {
  Sub s{root.add_subcommand(name, help), &common};
  s.app->add_option("--config", common.config, "flat key=value file; flags win")
      ->check(CLI::ExistingFile);
  s.app->add_option("--out", common.out, "output directory")->capture_default_str();
  s.app->add_option("--seed", common.seed, "seed")->capture_default_str();
  s.app->add_option("--threads", common.threads, "worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  return s;
}

void AddData(CLI::App* app, nc::DataArgs& d) {
  app->add_option("--attribute", d.attribute, "morphological attribute, e.g. Number");
  app->add_option("--corpus", d.corpus, "corpus id recorded in outputs");
  app->add_option("--layer", d.layer, "layer tag recorded in outputs");
}

void AddHyper(CLI::App* app, neuronrank::LinearHyper& h) {
  app->add_option("--l1", h.l1, "linear probe L1 weight")->capture_default_str();
  app->add_option("--l2", h.l2, "linear probe L2 weight")->capture_default_str();
  app->add_option("--lr", h.learning_rate, "linear probe learning rate")->capture_default_str();
  app->add_option("--epochs", h.epochs, "linear probe epochs")->capture_default_str();
  app->add_option("--batch-size", h.batch_size, "linear probe batch size")->capture_default_str();
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Fills options not given on the command line from the config file.
void ApplyConfig(const Sub& sub) {
  const std::string& path = sub.common->config;
  if (path.empty()) return;
  std::ifstream in(path);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw CLI::ConversionError(where + "expected key=value");
    std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = sub.app->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw CLI::ConversionError(where + "unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neuronrank: neuron importance rankings, probing and interventions"};
  app.require_subcommand(1);

  nc::SynthArgs synth;
  auto s_synth = AddSub(app, "synth", "generate a planted synthetic corpus", synth.common);
  s_synth.app->add_option("--spec", synth.spec, "synthetic spec file")->check(CLI::ExistingFile);
  s_synth.app->add_option("--train-fraction", synth.train_fraction)->capture_default_str();
  s_synth.app->add_option("--dev-fraction", synth.dev_fraction)->capture_default_str();

  nc::RankArgs rank;
  auto s_rank = AddSub(app, "rank", "rank neurons with each method", rank.common);
  s_rank.app->add_option("--data", rank.data, "data directory written by synth");
  AddData(s_rank.app, rank.data_args);
  s_rank.app->add_option("--method", rank.method, "all, probeless, linear or gaussian")
      ->capture_default_str();
  s_rank.app->add_option("--k-max", rank.k_max, "greedy steps before the tail fill")
      ->capture_default_str();
  AddHyper(s_rank.app, rank.hyper);

  nc::ProbeArgs probe;
  auto s_probe = AddSub(app, "probe", "top-k accuracy curves, significance, clusters",
                        probe.common);
  s_probe.app->add_option("--data", probe.data, "data directories, one per config")
      ->delimiter(',');
  s_probe.app
      ->add_option("--rankings", probe.rankings,
                   "ranking directories, one per --data (default <data>/rankings)")
      ->delimiter(',');
  AddData(s_probe.app, probe.data_args);
  s_probe.app->add_option("--probe", probe.probe, "linear, gaussian or both")
      ->capture_default_str();
  s_probe.app->add_option("--ks", probe.ks, "neuron counts (default scaled 10..150 grid)")
      ->delimiter(',');
  s_probe.app->add_option("--control-seed", probe.control_seed)->capture_default_str();
  s_probe.app->add_option("--clusters", probe.clusters, "K for pattern clustering")
      ->capture_default_str();
  AddHyper(s_probe.app, probe.hyper);

  nc::InterveneArgs intervene;
  auto s_int = AddSub(app, "intervene", "ablate or translate top-ranked neurons",
                      intervene.common);
  s_int.app->add_option("--data", intervene.data, "data directory written by synth");
  s_int.app->add_option("--rankings", intervene.rankings, "ranking files or directories")
      ->delimiter(',');
  s_int.app->add_option("--decoder", intervene.decoder, "decoder JSON (default <data>/decoder.json)");
  AddData(s_int.app, intervene.data_args);
  s_int.app->add_option("--method", intervene.method, "translation or ablation")
      ->capture_default_str();
  s_int.app->add_option("--beta", intervene.beta)->capture_default_str();
  s_int.app->add_option("--ks", intervene.ks, "neuron counts (default 0 and the scaled grid)")
      ->delimiter(',');

  nc::OverlapArgs overlap;
  auto s_ov = AddSub(app, "overlap", "pairwise top-m overlap matrix", overlap.common);
  s_ov.app->add_option("--rankings", overlap.rankings, "ranking files or directories")
      ->delimiter(',');
  s_ov.app->add_option("--labels", overlap.labels, "one label per ranking")->delimiter(',');
  s_ov.app->add_option("--m", overlap.m, "top-m size");

  nc::ReportArgs report;
  auto s_rep = AddSub(app, "report", "charts and a JSON summary from earlier outputs",
                      report.common);
  s_rep.app->add_option("--in", report.inputs, "probe or intervene output directories")
      ->delimiter(',');

  const Sub subs[] = {s_synth, s_rank, s_probe, s_int, s_ov, s_rep};
  try {
    app.parse(argc, argv);
    for (const auto& sub : subs) {
      if (!sub.app->parsed()) continue;
      ApplyConfig(sub);
      sub.common->seed_given = sub.app->get_option("--seed")->count() > 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (s_synth.app->parsed()) {
      if (synth.spec.empty()) throw neuronrank::DataError("--spec is required");
      return nc::RunSynth(synth);
    }
    if (s_rank.app->parsed()) return nc::RunRank(rank);
    if (s_probe.app->parsed()) return nc::RunProbe(probe);
    if (s_int.app->parsed()) return nc::RunIntervene(intervene);
    if (s_ov.app->parsed()) return nc::RunOverlap(overlap);
    return nc::RunReport(report);
  } catch (const neuronrank::Error& e) {
    std::cerr << "neuronrank: " << e.kind() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "neuronrank: " << e.what() << "\n";
  }
  return 1;
}
