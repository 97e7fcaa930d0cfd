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

// JSON, CSV and SVG renderings of library results.

#ifndef NEURONRANK_IO_HPP_
#define NEURONRANK_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "neuronrank/interventions.hpp"
#include "neuronrank/overlap.hpp"
#include "neuronrank/probes.hpp"
#include "neuronrank/probing_eval.hpp"
#include "neuronrank/rankings.hpp"
#include "neuronrank/synth.hpp"

namespace neuronrank {

using Json = nlohmann::json;

Json ToJson(const Ranking& r);
// Throws FormatError on a missing field or a non-permutation order.
Ranking RankingFromJson(const Json& j);
Ranking ReadRanking(const std::filesystem::path& path);
void WriteRanking(const Ranking& r, const std::filesystem::path& path);

Json ToJson(const LinearProbe& p);
LinearProbe LinearProbeFromJson(const Json& j);
Json ToJson(const GaussianProbe& p);
GaussianProbe GaussianProbeFromJson(const Json& j);

Json ToJson(const ToyLinearDecoder& d);
ToyLinearDecoder DecoderFromJson(const Json& j);

Json ToJson(const SynthTruth& t);
Json ToJson(const AccuracyCurve& c);
Json ToJson(const InterventionReport& r);

Json ReadJson(const std::filesystem::path& path);
void WriteJson(const Json& j, const std::filesystem::path& path);

// Shortest decimal that parses back to the same double; "nan" for NaN.
std::string FormatNumber(double v);

// Comma-separated, header row, LF line endings.
void WriteCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);
// Returns rows without the header; `header` receives it.
std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path,
                                              std::vector<std::string>* header = nullptr);

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};
std::string SvgLineChart(const std::string& title, const std::vector<SvgSeries>& series);
// Cells above `threshold` are blue, the rest red; the diagonal is grey.
std::string SvgOverlapGrid(const OverlapMatrix& matrix);
void WriteText(const std::string& text, const std::filesystem::path& path);

}  // namespace neuronrank

#endif  // NEURONRANK_IO_HPP_
