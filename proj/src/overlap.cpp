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

#include "neuronrank/overlap.hpp"

#include <cmath>
#include <sstream>

#include "neuronrank/error.hpp"

namespace neuronrank {
namespace {

void CheckRange(std::size_t n, std::size_t m, std::size_t i) {
  if (m < 1 || m > n) throw RangeError("need 1 <= m <= n");
  if (i < 2) throw RangeError("need at least two rankings");
}

mpz_class Pow(const mpz_class& base, std::size_t e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

}  // namespace

std::size_t TopMOverlap(const std::vector<Ranking>& rankings, std::size_t m) {
  if (rankings.empty()) throw RangeError("no rankings");
  const std::size_t d = rankings.front().dims();
  for (const auto& r : rankings) {
    if (r.dims() != d) throw DimMismatchError("rankings differ in d");
  }
  if (m > d) throw RangeError("m exceeds d");
  std::vector<std::size_t> hits(d, 0);
  for (const auto& r : rankings) {
    for (std::size_t p = 0; p < m; ++p) ++hits[r.order[p]];
  }
  std::size_t overlap = 0;
  for (auto h : hits) overlap += h == rankings.size();
  return overlap;
}

double ExpectedOverlapClosed(std::size_t n, std::size_t m, std::size_t i) {
  CheckRange(n, m, i);
  return std::pow(static_cast<double>(m), static_cast<double>(i)) /
         std::pow(static_cast<double>(n), static_cast<double>(i - 1));
}

mpq_class ExpectedOverlapClosedExact(std::size_t n, std::size_t m, std::size_t i) {
  CheckRange(n, m, i);
  mpq_class q(Pow(mpz_class(static_cast<unsigned long>(m)), i),
              Pow(mpz_class(static_cast<unsigned long>(n)), i - 1));
  q.canonicalize();
  return q;
}

mpz_class Binomial(std::size_t n, std::size_t k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

OverlapTable::OverlapTable(std::size_t i, std::size_t cap) : i_(i), cap_(cap) {
  if (i < 2) throw RangeError("need at least two rankings");
}

const mpz_class& OverlapTable::Count(std::size_t n, std::size_t m, std::size_t k) {
  if (n > cap_) {
    throw BudgetError("n=" + std::to_string(n) + " exceeds the exact-table cap of " +
                      std::to_string(cap_) + "; use the closed form");
  }
  const auto key = std::make_tuple(n, m, k);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  mpz_class value = 0;
  if (k >= 1 && k <= m && m <= n) {
    mpz_class rest = Pow(Binomial(n - k, m - k), i_);
    for (std::size_t j = 1; j <= m - k; ++j) rest -= Count(n - k, m - k, j);
    value = Binomial(n, k) * rest;
  }
  return memo_.emplace(key, std::move(value)).first->second;
}

mpq_class OverlapTable::Expectation(std::size_t n, std::size_t m) {
  CheckRange(n, m, i_);
  mpz_class weighted = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    weighted += mpz_class(static_cast<unsigned long>(k)) * Count(n, m, k);
  }
  mpq_class q(weighted, Pow(Binomial(n, m), i_));
  q.canonicalize();
  return q;
}

mpz_class OverlapTable::CountNone(std::size_t n, std::size_t m) {
  mpz_class none = Pow(Binomial(n, m), i_);
  for (std::size_t k = 1; k <= m; ++k) none -= Count(n, m, k);
  return none;
}

mpq_class ExpectedOverlapExact(std::size_t n, std::size_t m, std::size_t i, std::size_t cap) {
  CheckRange(n, m, i);
  if (n > cap) {
    throw BudgetError("n=" + std::to_string(n) + " exceeds the exact-table cap of " +
                      std::to_string(cap) + "; use the closed form");
  }
  OverlapTable table(i, cap);
  return table.Expectation(n, m);
}

std::string FormatFraction(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string FormatDecimal(const mpq_class& q, int digits) {
  // Round half away from zero at `digits` decimals.
  mpz_class scale = Pow(mpz_class(10), static_cast<std::size_t>(digits));
  mpz_class num = q.get_num() * scale;
  const mpz_class& den = q.get_den();
  const bool negative = num < 0;
  if (negative) num = -num;
  mpz_class scaled = (2 * num + den) / (2 * den);
  mpz_class whole = scaled / scale;
  mpz_class frac = scaled % scale;
  std::string out = (negative ? "-" : "") + whole.get_str();
  if (digits == 0) return out;
  std::string fs = frac.get_str();
  fs.insert(0, static_cast<std::size_t>(digits) - fs.size(), '0');
  return out + "." + fs;
}

OverlapMatrix ComputeOverlapMatrix(const std::vector<Ranking>& rankings,
                                   const std::vector<std::string>& labels, std::size_t m) {
  if (rankings.size() < 2) throw RangeError("overlap matrix needs at least two rankings");
  if (labels.size() != rankings.size()) throw RangeError("one label per ranking");
  OverlapMatrix out;
  out.labels = labels;
  out.m = m;
  out.d = rankings.front().dims();
  const std::size_t r = rankings.size();
  out.counts.assign(r, std::vector<std::size_t>(r, 0));
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a; b < r; ++b) {
      const std::size_t c = TopMOverlap({rankings[a], rankings[b]}, m);
      out.counts[a][b] = c;
      out.counts[b][a] = c;
    }
  }
  out.expected = ExpectedOverlapClosed(out.d, m, 2);
  return out;
}

}  // namespace neuronrank
