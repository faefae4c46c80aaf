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

// Watchlist subsumption index.
//
// Answers "which stored clauses does C subsume". Every stored clause carries a
// PruneVec, a small vector of per-literal maxima that can only grow under
// substitution; a stored clause is handed to the full subsumption test only
// if the query's PruneVec is componentwise <= its own.
//
// In Single mode every clause sits in one bucket. In Multi mode there is one
// bucket per clause code and a query only visits buckets whose code is a
// superset of its own, since substitution never changes the signed predicate
// symbols of a clause.

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hintgrind/logic.hpp"

namespace hintgrind {

// Layout: [0] max literal depth, [1] max non-variable symbols in a literal,
// then predicate buckets (+, -) and function buckets (+, -). Symbols are
// folded into buckets by id; a component is the maximum over literals of
// that sign of the occurrences falling into the bucket.
class PruneVec {
 public:
  static constexpr int kPredicateBuckets = 4;
  static constexpr int kFunctionBuckets = 11;
  static constexpr int kSize = 2 + 2 * kPredicateBuckets + 2 * kFunctionBuckets;

  PruneVec() { values_.fill(0); }

  static PruneVec of(const Clause& c, const SymbolTable& symbols) {
    PruneVec pv;
    std::array<std::uint32_t, kSize> lit{};
    for (const auto& l : c.literals()) {
      lit.fill(0);
      const int sign = l.positive ? 0 : 1;
      lit[0] = depth(l.view(), 0);
      for (const auto& n : l.atom) {
        if (n.is_var()) continue;
        ++lit[1];
        if (symbols.info(n.symbol).kind == SymbolKind::Predicate) {
          ++lit[predicate_slot(sign, n.symbol)];
        } else {
          ++lit[function_slot(sign, n.symbol)];
        }
      }
      for (int i = 0; i < kSize; ++i) {
        auto v = static_cast<std::uint8_t>(std::min<std::uint32_t>(lit[static_cast<std::size_t>(i)], 255));
        pv.values_[static_cast<std::size_t>(i)] = std::max(pv.values_[static_cast<std::size_t>(i)], v);
      }
    }
    return pv;
  }

  // True when every component of *this is <= the matching one of `o`.
  bool below(const PruneVec& o) const {
    bool ok = true;
    for (std::size_t i = 0; i < values_.size(); ++i) ok &= values_[i] <= o.values_[i];
    return ok;
  }

  const std::array<std::uint8_t, kSize>& values() const { return values_; }

 private:
  static int predicate_slot(int sign, SymbolId s) {
    return 2 + sign * kPredicateBuckets + s % kPredicateBuckets;
  }
  static int function_slot(int sign, SymbolId s) {
    return 2 + 2 * kPredicateBuckets + sign * kFunctionBuckets + s % kFunctionBuckets;
  }
  static std::uint32_t depth(TermView t, std::size_t pos) {
    std::uint32_t d = 0;
    if (t[pos].is_var()) return 1;
    for_each_arg(t, pos, [&](std::size_t c) { d = std::max(d, depth(t, c)); });
    return d + 1;
  }

  std::array<std::uint8_t, kSize> values_;
};

struct WatchHit {
  int watchlist = 0;
  int clause = 0;
  friend auto operator<=>(const WatchHit&, const WatchHit&) = default;
};

struct IndexStats {
  std::uint64_t queries = 0;
  std::uint64_t candidates = 0;         // stored clauses in visited buckets
  std::uint64_t subsumption_calls = 0;  // full tests after PruneVec gating
  std::uint64_t subsumption_successes = 0;

  void merge(const IndexStats& o) {
    queries += o.queries;
    candidates += o.candidates;
    subsumption_calls += o.subsumption_calls;
    subsumption_successes += o.subsumption_successes;
  }
};

enum class IndexMode : std::uint8_t { Single, Multi };

class WatchlistIndex {
 public:
  static constexpr std::size_t kLinearScanLimit = 1024;

  WatchlistIndex(IndexMode mode, std::shared_ptr<const SymbolTable> symbols)
      : mode_(mode), symbols_(std::move(symbols)) {
    if (mode_ == IndexMode::Single) buckets_.push_back(Bucket{});
  }

  IndexMode mode() const { return mode_; }

  void insert(const Clause& d, int watchlist, int clause) {
    if (frozen_) throw std::logic_error("insert into a frozen watchlist index");
    std::uint64_t pair = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(watchlist)) << 32) |
                         static_cast<std::uint32_t>(clause);
    if (!stored_pairs_.insert(pair).second) return;
    std::string key = content_key(d);
    auto [it, fresh] = by_content_.try_emplace(std::move(key), entries_.size());
    if (fresh) {
      entries_.push_back(Entry{d, PruneVec::of(d, *symbols_), {}});
      bucket_for(clause_code(d)).entries.push_back(it->second);
    }
    entries_[it->second].owners.push_back(WatchHit{watchlist, clause});
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::vector<WatchHit> match(const Clause& c, IndexStats& stats) const {
    ++stats.queries;
    std::vector<WatchHit> hits;
    PruneVec pv = PruneVec::of(c, *symbols_);
    auto visit = [&](const Bucket& b) {
      for (std::size_t e : b.entries) {
        const Entry& entry = entries_[e];
        ++stats.candidates;
        if (!pv.below(entry.prune)) continue;
        ++stats.subsumption_calls;
        if (subsumes_check(c, entry.clause)) {
          ++stats.subsumption_successes;
          hits.insert(hits.end(), entry.owners.begin(), entry.owners.end());
        }
      }
    };
    if (mode_ == IndexMode::Single) {
      visit(buckets_[0]);
    } else {
      for_each_superset_bucket(clause_code(c), [&](std::size_t b) { visit(buckets_[b]); });
    }
    std::sort(hits.begin(), hits.end());
    return hits;
  }

  std::vector<WatchHit> match(const Clause& c) { return match(c, stats_); }

  const IndexStats& stats() const { return stats_; }
  void reset_stats() { stats_ = IndexStats{}; }

  std::size_t bucket_count() const { return buckets_.size(); }
  std::size_t max_bucket_size() const {
    std::size_t m = 0;
    for (const auto& b : buckets_) m = std::max(m, b.entries.size());
    return m;
  }
  std::size_t singleton_buckets() const {
    return static_cast<std::size_t>(std::count_if(
        buckets_.begin(), buckets_.end(), [](const Bucket& b) { return b.entries.size() == 1; }));
  }
  std::size_t unique_clauses() const { return entries_.size(); }
  std::size_t stored_pairs() const { return stored_pairs_.size(); }

  // All stored (watchlist, clause) pairs, sorted.
  std::vector<WatchHit> contents() const {
    std::vector<WatchHit> out;
    for (const auto& e : entries_) out.insert(out.end(), e.owners.begin(), e.owners.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // Code of every bucket, for inspection; Single mode reports one empty code.
  std::vector<std::pair<ClauseCode, std::size_t>> bucket_sizes() const {
    std::vector<std::pair<ClauseCode, std::size_t>> out;
    for (const auto& b : buckets_) out.emplace_back(b.code, b.entries.size());
    return out;
  }

 private:
  struct Entry {
    Clause clause;
    PruneVec prune;
    std::vector<WatchHit> owners;
  };
  struct Bucket {
    ClauseCode code;
    std::vector<std::size_t> entries;
  };

  static std::string content_key(const Clause& d) {
    std::string key;
    for (const auto& l : d.literals()) {
      key += l.positive ? '+' : '-';
      key.append(reinterpret_cast<const char*>(l.atom.data()), l.atom.size() * sizeof(TermNode));
      key += '|';
    }
    return key;
  }

  Bucket& bucket_for(const ClauseCode& code) {
    if (mode_ == IndexMode::Single) return buckets_[0];
    auto [it, fresh] = bucket_of_code_.try_emplace(code, buckets_.size());
    if (fresh) {
      buckets_.push_back(Bucket{code, {}});
      for (auto k : code.keys()) buckets_with_key_[k].push_back(it->second);
    }
    return buckets_[it->second];
  }

  template <typename Fn>
  void for_each_superset_bucket(const ClauseCode& code, Fn&& fn) const {
    if (code.empty() || buckets_.size() <= kLinearScanLimit) {
      for (std::size_t b = 0; b < buckets_.size(); ++b)
        if (code.subset_of(buckets_[b].code)) fn(b);
      return;
    }
    // Intersect the posting lists of the query's signed predicates, starting
    // with the shortest.
    std::vector<const std::vector<std::size_t>*> lists;
    for (auto k : code.keys()) {
      auto it = buckets_with_key_.find(k);
      if (it == buckets_with_key_.end()) return;
      lists.push_back(&it->second);
    }
    std::sort(lists.begin(), lists.end(),
              [](const auto* a, const auto* b) { return a->size() < b->size(); });
    std::vector<std::size_t> acc = *lists[0];
    std::vector<std::size_t> next;
    for (std::size_t i = 1; i < lists.size() && !acc.empty(); ++i) {
      next.clear();
      std::set_intersection(acc.begin(), acc.end(), lists[i]->begin(), lists[i]->end(),
                            std::back_inserter(next));
      acc.swap(next);
    }
    for (std::size_t b : acc) fn(b);
  }

  IndexMode mode_;
  std::shared_ptr<const SymbolTable> symbols_;
  bool frozen_ = false;
  std::vector<Entry> entries_;
  std::vector<Bucket> buckets_;
  std::unordered_map<std::string, std::size_t> by_content_;
  std::unordered_map<ClauseCode, std::size_t, ClauseCodeHash> bucket_of_code_;
  std::unordered_map<std::int32_t, std::vector<std::size_t>> buckets_with_key_;
  std::unordered_set<std::uint64_t> stored_pairs_;
  IndexStats stats_;
};

}  // namespace hintgrind
