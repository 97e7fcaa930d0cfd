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

// Overlap between the top-m neurons of several rankings, and the overlap
// expected when the rankings are independent and uniformly random.
//
// E_i(n, m) = m^i / n^(i-1): each neuron is in all i top-m sets with
// probability (m/n)^i. The counting recurrence
//
//   C_i[n,m,k] = C(n,k) * (C(n-k,m-k)^i - sum_{j=1}^{m-k} C_i[n-k,m-k,j])
//
// (number of i-tuples of m-subsets of [n] whose common intersection has
// exactly k elements) gives the same value exactly and is kept as an
// independent check for small n.

#ifndef NEURONRANK_OVERLAP_HPP_
#define NEURONRANK_OVERLAP_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "neuronrank/rankings.hpp"

namespace neuronrank {

// |intersection of the top-m sets|. Throws DimMismatchError.
std::size_t TopMOverlap(const std::vector<Ranking>& rankings, std::size_t m);

double ExpectedOverlapClosed(std::size_t n, std::size_t m, std::size_t i);
// Same quantity as an exact fraction.
mpq_class ExpectedOverlapClosedExact(std::size_t n, std::size_t m, std::size_t i);

inline constexpr std::size_t kDefaultOverlapCap = 64;

// Memoized C_i[n, m, k] tables for one ranking count i.
class OverlapTable {
 public:
  explicit OverlapTable(std::size_t i, std::size_t cap = kDefaultOverlapCap);

  std::size_t rankings() const { return i_; }
  // Throws BudgetError when n exceeds the cap.
  const mpz_class& Count(std::size_t n, std::size_t m, std::size_t k);
  // sum_{k>=1} k * C / C(n,m)^i.
  mpq_class Expectation(std::size_t n, std::size_t m);
  // Number of tuples with an empty common intersection (the k = 0 mass).
  mpz_class CountNone(std::size_t n, std::size_t m);

 private:
  std::size_t i_;
  std::size_t cap_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, mpz_class> memo_;
};

mpz_class Binomial(std::size_t n, std::size_t k);
mpq_class ExpectedOverlapExact(std::size_t n, std::size_t m, std::size_t i,
                               std::size_t cap = kDefaultOverlapCap);
// "p/q" and a decimal rendering.
std::string FormatFraction(const mpq_class& q);
std::string FormatDecimal(const mpq_class& q, int digits = 12);

struct OverlapMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;  // symmetric
  double expected = 0.0;                         // E_2(d, m)
  std::size_t m = 0;
  std::size_t d = 0;

  bool AboveExpected(std::size_t a, std::size_t b) const {
    return static_cast<double>(counts[a][b]) > expected;
  }
};

// Pairwise top-m overlaps. Throws RangeError for fewer than two rankings.
OverlapMatrix ComputeOverlapMatrix(const std::vector<Ranking>& rankings,
                                   const std::vector<std::string>& labels, std::size_t m);

}  // namespace neuronrank

#endif  // NEURONRANK_OVERLAP_HPP_
