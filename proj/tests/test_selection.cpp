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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "hintgrind/selection.hpp"

using namespace hintgrind;

namespace {

Trace trace_of(const std::string& name, std::vector<int> ids, std::vector<std::vector<double>> rows) {
  Trace t;
  t.problem = name;
  t.watchlist_ids = std::move(ids);
  for (auto& r : rows) t.steps.push_back(TraceStep{0, false, std::move(r)});
  return t;
}

MeanMatrix matrix(std::vector<std::vector<double>> rows) {
  MeanMatrix m;
  for (std::size_t c = 0; c < rows.at(0).size(); ++c) m.watchlist_ids.push_back(static_cast<int>(c));
  for (std::size_t r = 0; r < rows.size(); ++r) m.problems.push_back("p" + std::to_string(r));
  m.rows = std::move(rows);
  return m;
}

MeanMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
  for (auto& r : m)
    for (auto& x : r) x = std::round(u(rng) * 1000) / 1000;
  return matrix(m);
}

}  // namespace

TEST(MeanMatrix, RowsAreTwoPassMeans) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Trace> traces;
  for (int p = 0; p < 5; ++p) {
    std::vector<std::vector<double>> steps(200 + static_cast<std::size_t>(p) * 37, std::vector<double>(4));
    for (auto& s : steps)
      for (auto& x : s) x = u(rng);
    traces.push_back(trace_of("p" + std::to_string(p), {3, 5, 8, 9}, steps));
  }
  auto m = build_mean_matrix(traces);
  ASSERT_EQ(m.rows.size(), 5u);
  EXPECT_EQ(m.watchlist_ids, (std::vector<int>{3, 5, 8, 9}));
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t c = 0; c < 4; ++c) {
      double sum = 0;
      for (const auto& s : traces[p].steps) sum += s.psv[c];
      EXPECT_NEAR(m.rows[p][c], sum / static_cast<double>(traces[p].steps.size()), 1e-12);
    }
}

TEST(MeanMatrix, HeaderMismatchNamesBothHeaders) {
  std::vector<Trace> traces{trace_of("a", {1, 2}, {{0, 0}}), trace_of("b", {1, 3}, {{0, 0}})};
  try {
    build_mean_matrix(traces);
    FAIL();
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("2 1 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2 1 3"), std::string::npos) << msg;
  }
}

TEST(MeanMatrix, EmptyTracesAreSkippedWithWarning) {
  std::vector<Trace> traces{trace_of("a", {1}, {{0.5}}), trace_of("b", {1}, {})};
  std::ostringstream warn;
  auto m = build_mean_matrix(traces, &warn);
  EXPECT_EQ(m.rows.size(), 1u);
  EXPECT_NE(warn.str().find("b"), std::string::npos);
}

TEST(Select, MeanAndVarRankWithStableTies) {
  auto m = matrix({{0.2, 0.5, 0.5, 0.1}, {0.4, 0.5, 0.5, 0.9}});
  EXPECT_EQ(select_mean(m, 3), (std::vector<std::size_t>{1, 2, 3}));
  // Variances: 0.01, 0, 0, 0.16.
  EXPECT_EQ(select_var(m, 2), (std::vector<std::size_t>{3, 0}));
  EXPECT_THROW(select_mean(m, 5), ConfigError);
  EXPECT_TRUE(select_mean(m, 0).empty());
}

TEST(Select, VarianceIsPopulationVariance) {
  auto m = random_matrix(30, 6, 2);
  auto mean = column_means(m);
  auto var = column_variances(m);
  for (std::size_t c = 0; c < 6; ++c) {
    double s = 0, s2 = 0;
    for (const auto& r : m.rows) {
      s += r[c];
      s2 += r[c] * r[c];
    }
    double n = 30;
    EXPECT_NEAR(var[c], s2 / n - (s / n) * (s / n), 1e-12);
  }
}

// Brute-force replay of the greedy max-min rule.
TEST(Select, CorrFollowsGreedyMaxMin) {
  auto m = random_matrix(25, 12, 3);
  // Make two columns near copies and one constant.
  for (auto& r : m.rows) {
    r[5] = r[2] * 0.9 + 0.01;
    r[7] = 0.25;
  }
  auto mean = column_means(m);
  auto var = column_variances(m);
  auto corr = [&](std::size_t a, std::size_t b) {
    if (var[a] == 0 || var[b] == 0) return 0.0;
    double cov = 0;
    for (const auto& r : m.rows) cov += (r[a] - mean[a]) * (r[b] - mean[b]);
    return cov / 25 / std::sqrt(var[a] * var[b]);
  };
  auto got = select_corr(m, 12);
  std::vector<std::size_t> want;
  std::size_t seed = 0;
  for (std::size_t c = 0; c < 12; ++c)
    if (var[c] > 0 && (var[seed] == 0 || mean[c] > mean[seed])) seed = c;
  want.push_back(seed);
  while (want.size() < 11) {
    std::size_t best = 99;
    double best_score = 2;
    for (std::size_t c = 0; c < 12; ++c) {
      if (var[c] == 0 || std::find(want.begin(), want.end(), c) != want.end()) continue;
      double worst = 0;
      for (auto w : want) worst = std::max(worst, std::abs(corr(c, w)));
      if (worst < best_score) {
        best_score = worst;
        best = c;
      }
    }
    want.push_back(best);
  }
  want.push_back(7);
  EXPECT_EQ(got, want);
  // The near copy of column 2 comes late.
  auto pos2 = std::find(got.begin(), got.end(), 2) - got.begin();
  auto pos5 = std::find(got.begin(), got.end(), 5) - got.begin();
  EXPECT_GE(std::max(pos2, pos5), 9);
}

TEST(Select, RandIsUniform) {
  auto m = random_matrix(3, 10, 4);
  std::vector<double> count(10, 0);
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    auto pick = select_rand(m, 3, static_cast<std::uint64_t>(s));
    std::set<std::size_t> distinct(pick.begin(), pick.end());
    ASSERT_EQ(distinct.size(), 3u);
    for (auto c : pick) count[c] += 1;
  }
  double expected = trials * 3.0 / 10.0;
  double chi2 = 0;
  for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
  // 9 degrees of freedom; 27.88 is the 0.999 quantile.
  EXPECT_LT(chi2, 27.88);
  EXPECT_EQ(select_rand(m, 3, 5), select_rand(m, 3, 5));
}

TEST(Select, MethodNames) {
  EXPECT_EQ(parse_select_method("corr"), SelectMethod::Corr);
  EXPECT_THROW(parse_select_method("best"), ConfigError);
  auto m = random_matrix(4, 5, 6);
  EXPECT_EQ(select_watchlists(m, SelectMethod::Mean, 2), select_mean(m, 2));
}
