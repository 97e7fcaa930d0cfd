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

#include "neuronrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "neuronrank/error.hpp"

namespace neuronrank {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitWs(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// "0-7,12,15" -> {0..7, 12, 15}
NeuronSubset ParseNeuronList(const std::string& s) {
  NeuronSubset out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoul(part));
    } else {
      const auto lo = std::stoul(part.substr(0, dash));
      const auto hi = std::stoul(part.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("descending range " + part);
      for (auto i = lo; i <= hi; ++i) out.push_back(i);
    }
  }
  return out;
}

std::string FormatNeuronList(const NeuronSubset& s) {
  std::string out;
  for (auto i : s) {
    if (!out.empty()) out += ',';
    out += std::to_string(i);
  }
  return out;
}

}  // namespace

void SynthSpec::Validate() const {
  if (d == 0) throw SpecError("d must be positive");
  if (vocab.empty()) throw SpecError("vocabulary is empty");
  if (noise_sigma < 0 || base_scale < 0 || lemma_code_scale < 0) {
    throw SpecError("scales must be non-negative");
  }
  if (sentence_length == 0) throw SpecError("sentence_length must be positive");
  std::map<NeuronIndex, std::string> owner;
  auto claim = [&](const NeuronSubset& set, const std::string& who) {
    for (auto j : set) {
      if (j >= d) {
        throw SpecError(who + ": neuron " + std::to_string(j) + " >= d");
      }
      auto [it, fresh] = owner.emplace(j, who);
      if (!fresh) {
        throw SpecError("neuron " + std::to_string(j) + " planted for both " +
                        it->second + " and " + who);
      }
    }
  };
  claim(lemma_neurons, "lemma_neurons");
  for (const auto& [attr, p] : planted) {
    if (p.neurons.empty()) throw SpecError(attr + ": empty planted set");
    claim(p.neurons, attr);
    std::set<double> mags;
    for (const auto& [v, m] : p.magnitudes) {
      if (!mags.insert(m).second) {
        throw SpecError(attr + ": magnitude of '" + v + "' is not distinct");
      }
    }
  }
  std::set<std::string> surfaces;
  for (const auto& w : vocab) {
    if (w.surface.empty() || w.lemma.empty()) {
      throw SpecError("vocabulary entry with empty surface or lemma");
    }
    if (!surfaces.insert(w.surface).second) {
      throw SpecError("duplicate surface '" + w.surface + "'");
    }
    for (const auto& [attr, value] : w.feats) {
      auto p = planted.find(attr);
      if (p != planted.end() && !p->second.magnitudes.contains(value)) {
        throw SpecError("'" + w.surface + "': no magnitude for " + attr + "=" +
                        value);
      }
    }
  }
}

NeuronSubset SynthTruth::AllPlanted() const {
  NeuronSubset all = lemma_neurons;
  for (const auto& [attr, set] : planted) all.insert(all.end(), set.begin(), set.end());
  std::sort(all.begin(), all.end());
  return all;
}

SynthCorpus SynthGenerate(const SynthSpec& spec) {
  spec.Validate();
  const auto d = static_cast<Eigen::Index>(spec.d);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::set<std::string> lemma_names;
  for (const auto& w : spec.vocab) lemma_names.insert(w.lemma);
  std::map<std::string, VectorD> base;
  for (const auto& lemma : lemma_names) {
    VectorD b(d);
    for (Eigen::Index j = 0; j < d; ++j) b[j] = spec.base_scale * normal(rng);
    for (auto j : spec.lemma_neurons) {
      b[static_cast<Eigen::Index>(j)] = spec.lemma_code_scale * normal(rng);
    }
    base.emplace(lemma, std::move(b));
  }

  const auto vocab_size = spec.vocab.size();
  SynthTruth truth;
  truth.lemma_neurons = spec.lemma_neurons;
  truth.prototypes.resize(static_cast<Eigen::Index>(vocab_size), d);
  for (const auto& [attr, p] : spec.planted) {
    truth.planted[attr] = p.neurons;
    truth.magnitudes[attr] = p.magnitudes;
  }
  Lexicon lexicon;
  for (std::size_t v = 0; v < vocab_size; ++v) {
    const auto& w = spec.vocab[v];
    VectorD proto = base.at(w.lemma);
    for (const auto& [attr, p] : spec.planted) {
      auto f = w.feats.find(attr);
      if (f == w.feats.end()) continue;
      const double m = p.magnitudes.at(f->second);
      for (auto j : p.neurons) proto[static_cast<Eigen::Index>(j)] = m;
    }
    truth.prototypes.row(static_cast<Eigen::Index>(v)) = proto.transpose();
    truth.vocab_surfaces.push_back(w.surface);
    lexicon.Add(w.surface, LexEntry{w.lemma, w.feats});
  }

  Matrix values(static_cast<Eigen::Index>(spec.tokens), d);
  std::vector<TokenKey> keys;
  std::vector<std::string> surfaces;
  AnnotationTable annotations;
  std::vector<std::size_t> order(vocab_size);
  for (std::size_t t = 0; t < spec.tokens; ++t) {
    if (t % vocab_size == 0) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
    }
    const std::size_t v = order[t % vocab_size];
    const auto& w = spec.vocab[v];
    const auto row = static_cast<Eigen::Index>(t);
    for (Eigen::Index j = 0; j < d; ++j) {
      values(row, j) = static_cast<float>(truth.prototypes(static_cast<Eigen::Index>(v), j) +
                                          spec.noise_sigma * normal(rng));
    }
    TokenKey key{"s" + std::to_string(t / spec.sentence_length),
                 static_cast<int>(t % spec.sentence_length) + 1};
    keys.push_back(key);
    surfaces.push_back(w.surface);
    annotations.push_back(AnnotationRow{key, w.surface, w.feats});
  }
  return SynthCorpus{ReprSet(std::move(values), std::move(keys), std::move(surfaces)),
                     std::move(annotations), std::move(lexicon), std::move(truth)};
}

std::vector<CorpusSplit> SplitCorpus(const ReprSet& reprs, const AnnotationTable& annotations,
                                     double train_fraction, double dev_fraction) {
  if (annotations.size() != reprs.rows()) {
    throw AlignmentError("split: annotation and representation rows differ");
  }
  if (train_fraction < 0 || dev_fraction < 0 || train_fraction + dev_fraction > 1) {
    throw RangeError("split fractions must be non-negative and sum to at most 1");
  }
  const std::size_t n = reprs.rows();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  const auto n_dev = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(n))));
  const std::size_t bounds[] = {0, n_train, n_train + n_dev, n};
  std::vector<CorpusSplit> out;
  for (int s = 0; s < 3; ++s) {
    std::vector<std::size_t> rows(bounds[s + 1] - bounds[s]);
    std::iota(rows.begin(), rows.end(), bounds[s]);
    CorpusSplit split{reprs.SelectRows(rows), {}};
    for (auto r : rows) split.annotations.push_back(annotations[r]);
    out.push_back(std::move(split));
  }
  return out;
}

SynthSpec ParseSynthSpec(const std::string& text, const std::string& name) {
  SynthSpec spec;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> SpecError {
    return SpecError(name + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    try {
      const auto words = SplitWs(line);
      if (words[0] == "word") {
        if (words.size() < 3 || words.size() > 4) {
          throw fail("expected 'word <surface> <lemma> [feats]'");
        }
        spec.vocab.push_back(VocabEntry{words[1], words[2],
                                        words.size() == 4 ? ParseFeats(words[3]) : Features{}});
        continue;
      }
      if (words[0] == "plant") {
        if (words.size() != 4 || !words[2].starts_with("neurons=") ||
            !words[3].starts_with("values=")) {
          throw fail("expected 'plant <attr> neurons=<list> values=<V:m,...>'");
        }
        PlantedAttribute p;
        p.neurons = ParseNeuronList(words[2].substr(8));
        std::stringstream vs(words[3].substr(7));
        std::string item;
        while (std::getline(vs, item, ',')) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) throw fail("bad value '" + item + "'");
          p.magnitudes[item.substr(0, colon)] = std::stod(item.substr(colon + 1));
        }
        for (const auto& [other, q] : spec.planted) {
          for (auto j : p.neurons) {
            if (std::binary_search(q.neurons.begin(), q.neurons.end(), j)) {
              throw fail("neuron " + std::to_string(j) + " already planted for " + other);
            }
          }
        }
        if (!spec.planted.emplace(words[1], std::move(p)).second) {
          throw fail("attribute '" + words[1] + "' planted twice");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw fail("unrecognized line");
      const std::string key = Trim(line.substr(0, eq));
      const std::string value = Trim(line.substr(eq + 1));
      if (key == "d") spec.d = std::stoul(value);
      else if (key == "tokens") spec.tokens = std::stoul(value);
      else if (key == "noise_sigma") spec.noise_sigma = std::stod(value);
      else if (key == "base_scale") spec.base_scale = std::stod(value);
      else if (key == "lemma_code_scale") spec.lemma_code_scale = std::stod(value);
      else if (key == "sentence_length") spec.sentence_length = std::stoul(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "lemma_neurons") spec.lemma_neurons = ParseNeuronList(value);
      else throw fail("unknown key '" + key + "'");
    } catch (const SpecError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(std::string("bad value: ") + e.what());
    }
  }
  try {
    spec.Validate();
  } catch (const SpecError& e) {
    throw SpecError(name + ": " + e.what());
  }
  return spec;
}

SynthSpec ReadSynthSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSynthSpec(ss.str(), path.string());
}

std::string FormatSynthSpec(const SynthSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "d = " << spec.d << "\n"
      << "tokens = " << spec.tokens << "\n"
      << "noise_sigma = " << spec.noise_sigma << "\n"
      << "base_scale = " << spec.base_scale << "\n"
      << "lemma_code_scale = " << spec.lemma_code_scale << "\n"
      << "sentence_length = " << spec.sentence_length << "\n"
      << "seed = " << spec.seed << "\n";
  if (!spec.lemma_neurons.empty()) {
    out << "lemma_neurons = " << FormatNeuronList(spec.lemma_neurons) << "\n";
  }
  for (const auto& [attr, p] : spec.planted) {
    out << "plant " << attr << " neurons=" << FormatNeuronList(p.neurons) << " values=";
    bool first = true;
    for (const auto& [v, m] : p.magnitudes) {
      out << (first ? "" : ",") << v << ":" << m;
      first = false;
    }
    out << "\n";
  }
  for (const auto& w : spec.vocab) {
    out << "word " << w.surface << " " << w.lemma << " " << FormatFeats(w.feats) << "\n";
  }
  return out.str();
}

SynthSpec MakeParadigmSpec(const ParadigmOptions& o) {
  SynthSpec spec;
  spec.d = o.d;
  spec.noise_sigma = o.noise_sigma;
  spec.base_scale = o.base_scale;
  spec.lemma_code_scale = o.lemma_code_scale;
  spec.tokens = o.tokens;
  spec.seed = o.seed;
  spec.lemma_neurons = o.lemma_neurons;
  PlantedAttribute p;
  p.neurons = o.planted;
  for (const auto& [value, m] : o.values) p.magnitudes[value] = m;
  spec.planted[o.attribute] = std::move(p);
  for (std::size_t l = 0; l < o.lemmas; ++l) {
    std::string lemma = "lem" + std::to_string(l);
    for (const auto& [value, m] : o.values) {
      spec.vocab.push_back(VocabEntry{lemma + "." + value, lemma, {{o.attribute, value}}});
    }
  }
  spec.Validate();
  return spec;
}

}  // namespace neuronrank
