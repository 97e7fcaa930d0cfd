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

// Subcommands of the neuronrank tool. Each returns the process exit code.

#ifndef NEURONRANK_TOOLS_CLI_COMMANDS_HPP_
#define NEURONRANK_TOOLS_CLI_COMMANDS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "neuronrank/probes.hpp"

namespace neuronrank::cli {

struct Common {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 1;
};

// Metadata and dataset location shared by rank, probe and intervene. A data
// directory holds {train,dev,test}.{nrt,tsv} and lexicon.tsv as written by
// `synth`.
struct DataArgs {
  std::string attribute;
  std::string corpus;
  std::string layer;
};

struct SynthArgs {
  Common common;
  std::string spec;
  double train_fraction = 0.6;
  double dev_fraction = 0.2;
};

struct RankArgs {
  Common common;
  DataArgs data_args;
  std::string data;
  std::string method = "all";
  std::size_t k_max = 16;
  LinearHyper hyper;
};

struct ProbeArgs {
  Common common;
  DataArgs data_args;
  std::vector<std::string> data;
  std::vector<std::string> rankings;
  std::string probe = "both";
  std::vector<std::size_t> ks;
  std::uint64_t control_seed = 1;
  std::size_t clusters = 3;
  LinearHyper hyper;
};

struct InterveneArgs {
  Common common;
  DataArgs data_args;
  std::string data;
  std::vector<std::string> rankings;
  std::string decoder;
  std::string method = "translation";
  double beta = 8.0;
  std::vector<std::size_t> ks;
};

struct OverlapArgs {
  Common common;
  std::vector<std::string> rankings;
  std::vector<std::string> labels;
  std::size_t m = 0;
};

struct ReportArgs {
  Common common;
  std::vector<std::string> inputs;
};

int RunSynth(const SynthArgs& args);
int RunRank(const RankArgs& args);
int RunProbe(const ProbeArgs& args);
int RunIntervene(const InterveneArgs& args);
int RunOverlap(const OverlapArgs& args);
int RunReport(const ReportArgs& args);

}  // namespace neuronrank::cli

#endif  // NEURONRANK_TOOLS_CLI_COMMANDS_HPP_
