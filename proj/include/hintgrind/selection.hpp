// Copyright 2026 The Hintgrind Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Global watchlist selection from the mean proof-state matrix.
//
// Each row of the matrix is one solved problem: the mean, over that search's
// given clauses, of the proof-state vector. Columns are candidate
// watchlists. Every selector returns k distinct column positions; ties go to
// the lower position.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hintgrind/common.hpp"
#include "hintgrind/saturation.hpp"

namespace hintgrind {

struct MeanMatrix {
  std::vector<int> watchlist_ids;  // column -> watchlist id
  std::vector<std::string> problems;
  std::vector<std::vector<double>> rows;

  std::size_t columns() const { return watchlist_ids.size(); }
};

inline std::string trace_header(const std::vector<int>& ids) {
  std::string s = std::to_string(ids.size());
  for (int id : ids) s += " " + std::to_string(id);
  return s;
}

// Traces without given clauses are skipped; each skip is reported through
// `warn` when given.
inline MeanMatrix build_mean_matrix(const std::vector<Trace>& traces, std::ostream* warn = nullptr) {
  if (traces.empty()) throw std::runtime_error("no traces to build the mean matrix from");
  MeanMatrix m;
  m.watchlist_ids = traces.front().watchlist_ids;
  for (const auto& t : traces) {
    if (t.watchlist_ids != m.watchlist_ids)
      throw std::runtime_error("trace header mismatch: '" + trace_header(m.watchlist_ids) + "' vs '" +
                               trace_header(t.watchlist_ids) + "' in " + t.problem);
    if (t.steps.empty()) {
      if (warn) *warn << "warning: trace " << t.problem << " has no given clauses, skipped\n";
      continue;
    }
    // Running mean; exact enough for ratios and never overflows.
    std::vector<double> row(m.columns(), 0.0);
    double n = 0;
    for (const auto& s : t.steps) {
      n += 1;
      for (std::size_t c = 0; c < row.size(); ++c) row[c] += (s.psv[c] - row[c]) / n;
    }
    m.problems.push_back(t.problem);
    m.rows.push_back(std::move(row));
  }
  return m;
}

inline std::vector<double> column_means(const MeanMatrix& m) {
  std::vector<double> mean(m.columns(), 0.0);
  for (const auto& r : m.rows)
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += r[c];
  if (!m.rows.empty())
    for (auto& x : mean) x /= static_cast<double>(m.rows.size());
  return mean;
}

// Population variance per column.
inline std::vector<double> column_variances(const MeanMatrix& m) {
  auto mean = column_means(m);
  std::vector<double> var(m.columns(), 0.0);
  for (const auto& r : m.rows)
    for (std::size_t c = 0; c < var.size(); ++c) var[c] += (r[c] - mean[c]) * (r[c] - mean[c]);
  if (!m.rows.empty())
    for (auto& x : var) x /= static_cast<double>(m.rows.size());
  return var;
}

namespace detail {

inline void check_k(const MeanMatrix& m, std::size_t k) {
  if (k > m.columns())
    throw ConfigError("cannot select " + std::to_string(k) + " of " + std::to_string(m.columns()) + " watchlists");
}

inline std::vector<std::size_t> top_k(const std::vector<double>& score, std::size_t k) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  idx.resize(k);
  return idx;
}

}  // namespace detail

inline std::vector<std::size_t> select_mean(const MeanMatrix& m, std::size_t k) {
  detail::check_k(m, k);
  return detail::top_k(column_means(m), k);
}

inline std::vector<std::size_t> select_var(const MeanMatrix& m, std::size_t k) {
  detail::check_k(m, k);
  return detail::top_k(column_variances(m), k);
}

// Pearson correlation of two columns; 0 when either is constant.
inline double column_correlation(const MeanMatrix& m, std::size_t a, std::size_t b,
                                 const std::vector<double>& mean, const std::vector<double>& var) {
  if (var[a] <= 0.0 || var[b] <= 0.0) return 0.0;
  double cov = 0.0;
  for (const auto& r : m.rows) cov += (r[a] - mean[a]) * (r[b] - mean[b]);
  cov /= static_cast<double>(m.rows.size());
  return cov / std::sqrt(var[a] * var[b]);
}

// Greedy max-min: start from the highest-mean non-constant column, then keep
// adding the column whose largest |correlation| with the chosen set is
// smallest. Constant columns are used only once the others run out.
inline std::vector<std::size_t> select_corr(const MeanMatrix& m, std::size_t k) {
  detail::check_k(m, k);
  if (k == 0) return {};
  auto mean = column_means(m);
  auto var = column_variances(m);
  std::vector<std::size_t> live, constant;
  for (std::size_t c = 0; c < m.columns(); ++c) (var[c] > 0.0 ? live : constant).push_back(c);

  std::vector<std::size_t> chosen;
  if (!live.empty()) {
    std::size_t seed = live[0];
    for (auto c : live)
      if (mean[c] > mean[seed]) seed = c;
    chosen.push_back(seed);
    std::vector<double> worst(m.columns(), 0.0);  // max |corr| against the chosen set
    std::vector<char> used(m.columns(), 0);
    used[seed] = 1;
    while (chosen.size() < k && chosen.size() < live.size()) {
      std::size_t last = chosen.back();
      std::size_t best = m.columns();
      for (auto c : live) {
        if (used[c]) continue;
        worst[c] = std::max(worst[c], std::abs(column_correlation(m, c, last, mean, var)));
        if (best == m.columns() || worst[c] < worst[best]) best = c;
      }
      used[best] = 1;
      chosen.push_back(best);
    }
  }
  for (std::size_t i = 0; chosen.size() < k; ++i) chosen.push_back(constant[i]);
  return chosen;
}

// Uniform sample without replacement (partial Fisher-Yates).
inline std::vector<std::size_t> select_rand(const MeanMatrix& m, std::size_t k, std::uint64_t seed) {
  detail::check_k(m, k);
  std::vector<std::size_t> idx(m.columns());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::size_t>(uniform_below(rng, idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

enum class SelectMethod : std::uint8_t { Mean, Var, Corr, Rand };

inline SelectMethod parse_select_method(std::string_view s) {
  if (s == "mean") return SelectMethod::Mean;
  if (s == "var") return SelectMethod::Var;
  if (s == "corr") return SelectMethod::Corr;
  if (s == "rand") return SelectMethod::Rand;
  throw ConfigError("unknown selection method '" + std::string(s) + "'");
}

inline std::vector<std::size_t> select_watchlists(const MeanMatrix& m, SelectMethod method, std::size_t k,
                                                  std::uint64_t seed = 0) {
  switch (method) {
    case SelectMethod::Mean: return select_mean(m, k);
    case SelectMethod::Var: return select_var(m, k);
    case SelectMethod::Corr: return select_corr(m, k);
    case SelectMethod::Rand: return select_rand(m, k, seed);
  }
  return {};
}

}  // namespace hintgrind
