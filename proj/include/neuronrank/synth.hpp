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

// Synthetic corpora with planted attribute neurons.
//
// Every token is drawn from a vocabulary of (surface, lemma, features). Its
// representation is built from three parts:
//   * a dense per-lemma base vector, N(0, base_scale^2) on every neuron;
//   * an optional per-lemma code on `lemma_neurons`, N(0, lemma_code_scale^2),
//     overwriting the base there;
//   * for every planted attribute the token carries, the magnitude of its
//     value written into that attribute's neuron set;
// plus N(0, noise_sigma^2) noise on every coordinate.
//
// Vocabulary entries are visited in seeded shuffled passes, so after every
// complete pass each entry has appeared equally often. With a full paradigm
// (every lemma inflected for every value) the unplanted class means then
// coincide and only planted neurons separate the classes.

#ifndef NEURONRANK_SYNTH_HPP_
#define NEURONRANK_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "neuronrank/data.hpp"

namespace neuronrank {

struct VocabEntry {
  std::string surface;
  std::string lemma;
  Features feats;
};

struct PlantedAttribute {
  NeuronSubset neurons;
  std::map<std::string, double> magnitudes;  // value -> signal
};

struct SynthSpec {
  std::size_t d = 64;
  std::vector<VocabEntry> vocab;
  std::map<std::string, PlantedAttribute> planted;
  NeuronSubset lemma_neurons;
  double noise_sigma = 0.1;
  double base_scale = 1.0;
  double lemma_code_scale = 3.0;
  std::size_t tokens = 1000;
  std::size_t sentence_length = 10;
  std::uint64_t seed = 0;

  // Throws SpecError.
  void Validate() const;
};

struct SynthTruth {
  std::map<std::string, NeuronSubset> planted;
  std::map<std::string, std::map<std::string, double>> magnitudes;
  NeuronSubset lemma_neurons;
  // Noise-free representation of each vocabulary entry (vocab order, V x d).
  MatrixD prototypes;
  std::vector<std::string> vocab_surfaces;

  // Union of all planted attribute sets and the lemma neurons, sorted.
  NeuronSubset AllPlanted() const;
};

struct SynthCorpus {
  ReprSet reprs;
  AnnotationTable annotations;
  Lexicon lexicon;
  SynthTruth truth;
};

SynthCorpus SynthGenerate(const SynthSpec& spec);

struct CorpusSplit {
  ReprSet reprs;
  AnnotationTable annotations;
};

// Contiguous train/dev/test row ranges; test takes the remainder.
std::vector<CorpusSplit> SplitCorpus(const ReprSet& reprs, const AnnotationTable& annotations,
                                     double train_fraction, double dev_fraction);

// Line-oriented spec format; see README. Errors carry `name:line:`.
SynthSpec ParseSynthSpec(const std::string& text, const std::string& name);
SynthSpec ReadSynthSpec(const std::filesystem::path& path);
std::string FormatSynthSpec(const SynthSpec& spec);

// A full paradigm: `lemmas` lemmas, each inflected for every value of one
// attribute. Surfaces are "<lemma>.<value>".
struct ParadigmOptions {
  std::size_t d = 64;
  std::size_t lemmas = 8;
  std::string attribute = "Number";
  std::vector<std::pair<std::string, double>> values = {{"Pl", 1.0},
                                                        {"Sg", 0.0}};
  NeuronSubset planted;
  NeuronSubset lemma_neurons;
  double noise_sigma = 0.1;
  double base_scale = 1.0;
  double lemma_code_scale = 3.0;
  std::size_t tokens = 2000;
  std::uint64_t seed = 0;
};
SynthSpec MakeParadigmSpec(const ParadigmOptions& options);

}  // namespace neuronrank

#endif  // NEURONRANK_SYNTH_HPP_
