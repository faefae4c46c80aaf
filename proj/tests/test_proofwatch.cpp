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

#include <fstream>

#include "hintgrind/proofwatch.hpp"
#include "support.hpp"

using namespace hintgrind;
using testing_support::clause_of;

namespace {

WatchlistState with_progress(const std::vector<int>& progress, const std::vector<int>& sizes) {
  WatchlistState st(sizes);
  std::vector<WatchHit> hits;
  for (std::size_t w = 0; w < sizes.size(); ++w)
    for (int c = 0; c < progress[w]; ++c) hits.push_back(WatchHit{static_cast<int>(w), c});
  st.record_matches(hits);
  return st;
}

}  // namespace

TEST(WatchlistState, TableOneRatios) {
  std::vector<int> progress{42, 56, 45, 9, 51, 7, 62, 73};
  std::vector<int> sizes{96, 77, 52, 25, 68, 27, 77, 242};
  std::vector<std::string> want{"0.438", "0.727", "0.865", "0.360", "0.750", "0.259", "0.805", "0.302"};
  auto st = with_progress(progress, sizes);
  auto r = st.completion_ratios();
  ASSERT_EQ(r.size(), want.size());
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(format_ratio(r[i]), want[i]) << i;
}

TEST(WatchlistState, ClausesCountOnce) {
  WatchlistState st({4});
  std::vector<WatchHit> hits{{0, 1}, {0, 1}, {0, 2}};
  st.record_matches(hits);
  st.record_matches(hits);
  EXPECT_EQ(st.progress(0), 2);
  EXPECT_DOUBLE_EQ(st.ratio(0), 0.5);
  std::vector<WatchHit> bad{{1, 0}};
  EXPECT_THROW(st.record_matches(bad), std::logic_error);
  EXPECT_THROW(WatchlistState({0}), std::invalid_argument);
}

// Relevance is the maximum ratio over the watchlists a clause hits.
TEST(Relevance, MatchesScanOracleOverSubsets) {
  std::vector<int> progress{42, 56, 45, 9, 51, 7, 62, 73};
  std::vector<int> sizes{96, 77, 52, 25, 68, 27, 77, 242};
  auto st = with_progress(progress, sizes);
  for (unsigned mask = 0; mask < 256; ++mask) {
    std::vector<WatchHit> hits;
    double best = -1;
    for (int w = 0; w < 8; ++w) {
      if (!(mask >> w & 1)) continue;
      hits.push_back(WatchHit{w, sizes[static_cast<std::size_t>(w)] - 1});
      best = std::max(best, static_cast<double>(progress[static_cast<std::size_t>(w)]) / sizes[static_cast<std::size_t>(w)]);
    }
    auto rel = relevance(st, hits);
    if (mask == 0) {
      EXPECT_FALSE(rel);
    } else {
      ASSERT_TRUE(rel);
      EXPECT_DOUBLE_EQ(*rel, best);
    }
  }
}

TEST(Priority, OrdersByRelevance) {
  EXPECT_EQ(watchlist_priority(std::nullopt), kNoMatchPriority);
  EXPECT_EQ(watchlist_priority(1.0), 0);
  EXPECT_EQ(watchlist_priority(0.0), 999);
  EXPECT_LT(watchlist_priority(0.8), watchlist_priority(0.3));
  EXPECT_LT(watchlist_priority(0.0), kNoMatchPriority);
}

TEST(ProofWatch, ObserveUsesStateBeforeOwnHits) {
  auto symbols = std::make_shared<SymbolTable>();
  std::vector<Watchlist> lists(2);
  lists[0].id = 10;
  lists[0].clauses = {clause_of("p(a)", *symbols), clause_of("q(b)", *symbols)};
  lists[1].id = 11;
  lists[1].clauses = {clause_of("p(a)", *symbols)};
  ProofWatch pw(lists, symbols);
  EXPECT_EQ(pw.ids(), (std::vector<int>{10, 11}));
  auto r0 = pw.observe(clause_of("q(X)", *symbols));
  ASSERT_TRUE(r0);
  EXPECT_EQ(*r0, 0.0);
  EXPECT_EQ(pw.state().completion_ratios(), (std::vector<double>{0.5, 0.0}));
  auto r1 = pw.observe(clause_of("p(X)", *symbols));
  ASSERT_TRUE(r1);
  EXPECT_EQ(*r1, 0.5);
  EXPECT_EQ(pw.state().completion_ratios(), (std::vector<double>{1.0, 1.0}));
  EXPECT_FALSE(pw.observe(clause_of("r(a)", *symbols)));
}

TEST(WatchlistFiles, WriteListParse) {
  auto dir = testing_support::scratch_dir("watchlists");
  SymbolTable t;
  std::vector<Clause> cs{clause_of("p(X) | ~q(f(X))", t), clause_of("r", t)};
  write_watchlist(dir, 7, "prob_b", cs, t);
  write_watchlist(dir, 2, "prob_a", cs, t);
  std::ofstream(dir / "notes.txt") << "ignored";
  auto files = list_watchlist_dir(dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].id, 2);
  EXPECT_EQ(files[0].source, "prob_a");
  EXPECT_EQ(files[1].path.filename(), "00007_prob_b.w");
  SymbolTable fresh;
  auto lists = load_watchlists(dir, fresh);
  ASSERT_EQ(lists.size(), 2u);
  EXPECT_EQ(lists[1].id, 7);
  ASSERT_EQ(lists[1].size(), 2);
  EXPECT_EQ(lists[1].clauses[1].origin().kind, OriginKind::WatchlistLoaded);
  EXPECT_EQ(serialize_clause(lists[1].clauses[0], fresh, "w"), serialize_clause(cs[0], t, "w"));
  EXPECT_THROW(list_watchlist_dir(dir / "missing"), std::runtime_error);
}
