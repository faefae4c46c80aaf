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

// Multiple watchlists: progress tracking, completion ratios, dynamic
// relevance and the watchlist priority function.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hintgrind/index.hpp"
#include "hintgrind/logic.hpp"
#include "hintgrind/tptp.hpp"

namespace hintgrind {

struct Watchlist {
  int id = 0;
  std::string source;
  std::vector<Clause> clauses;

  int size() const { return static_cast<int>(clauses.size()); }
};

class WatchlistState {
 public:
  WatchlistState() = default;
  explicit WatchlistState(const std::vector<int>& sizes) {
    matched_.reserve(sizes.size());
    for (int s : sizes) {
      if (s < 1) throw std::invalid_argument("watchlist size must be at least 1");
      matched_.emplace_back(static_cast<std::size_t>(s), false);
    }
    progress_.assign(sizes.size(), 0);
  }

  std::size_t count() const { return matched_.size(); }
  int progress(std::size_t w) const { return progress_.at(w); }
  int size(std::size_t w) const { return static_cast<int>(matched_.at(w).size()); }

  // Hits index watchlists by position in this state. A watchlist clause
  // counts once however often it is matched.
  void record_matches(std::span<const WatchHit> hits) {
    for (const auto& h : hits) {
      if (h.watchlist < 0 || static_cast<std::size_t>(h.watchlist) >= matched_.size())
        throw std::logic_error("watch hit for unknown watchlist " + std::to_string(h.watchlist));
      auto& m = matched_[static_cast<std::size_t>(h.watchlist)];
      if (h.clause < 0 || static_cast<std::size_t>(h.clause) >= m.size())
        throw std::logic_error("watch hit for unknown clause " + std::to_string(h.clause));
      if (!m[static_cast<std::size_t>(h.clause)]) {
        m[static_cast<std::size_t>(h.clause)] = true;
        ++progress_[static_cast<std::size_t>(h.watchlist)];
      }
    }
  }

  double ratio(std::size_t w) const {
    return static_cast<double>(progress_.at(w)) / static_cast<double>(matched_.at(w).size());
  }

  // The proof-state vector, ordered by watchlist position.
  std::vector<double> completion_ratios() const {
    std::vector<double> r(matched_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = ratio(i);
    return r;
  }

 private:
  std::vector<std::vector<bool>> matched_;
  std::vector<int> progress_;
};

// Maximum completion ratio over the distinct watchlists in `hits`, taken from
// the state before those hits are recorded.
inline std::optional<double> relevance(const WatchlistState& st, std::span<const WatchHit> hits) {
  if (hits.empty()) return std::nullopt;
  double best = 0.0;
  for (const auto& h : hits) best = std::max(best, st.ratio(static_cast<std::size_t>(h.watchlist)));
  return best;
}

inline constexpr int kPriorityLevels = 1000;
inline constexpr int kNoMatchPriority = kPriorityLevels;

// Lower is better. Matching clauses land in [0, 999] by descending relevance;
// everything else shares kNoMatchPriority.
inline int watchlist_priority(std::optional<double> rel) {
  if (!rel) return kNoMatchPriority;
  double r = std::clamp(*rel, 0.0, 1.0);
  return static_cast<int>(std::floor((1.0 - r) * (kPriorityLevels - 1) + 0.5));
}

inline std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", r);
  return buf;
}

// Index plus state for one search.
class ProofWatch {
 public:
  ProofWatch(const std::vector<Watchlist>& lists, std::shared_ptr<const SymbolTable> symbols,
             IndexMode mode = IndexMode::Multi)
      : index_(mode, std::move(symbols)) {
    std::vector<int> sizes;
    for (std::size_t w = 0; w < lists.size(); ++w) {
      ids_.push_back(lists[w].id);
      sizes.push_back(lists[w].size());
      for (std::size_t c = 0; c < lists[w].clauses.size(); ++c)
        index_.insert(lists[w].clauses[c], static_cast<int>(w), static_cast<int>(c));
    }
    index_.freeze();
    state_ = WatchlistState(sizes);
  }

  // Matches `c`, returns its relevance and then records its hits.
  std::optional<double> observe(const Clause& c) {
    auto hits = index_.match(c, stats_);
    auto rel = relevance(state_, hits);
    state_.record_matches(hits);
    return rel;
  }

  const WatchlistState& state() const { return state_; }
  const WatchlistIndex& index() const { return index_; }
  const IndexStats& stats() const { return stats_; }
  const std::vector<int>& ids() const { return ids_; }
  std::size_t count() const { return ids_.size(); }

 private:
  WatchlistIndex index_;
  WatchlistState state_;
  IndexStats stats_;
  std::vector<int> ids_;
};

// ---------------------------------------------------------------------------
// Watchlist directory: watchlists/<id>_<source>.w with a zero-padded id.

inline std::string watchlist_file_name(int id, const std::string& source) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d", id);
  return std::string(buf) + "_" + source + ".w";
}

inline void write_watchlist(const std::filesystem::path& dir, int id, const std::string& source,
                            std::span<const Clause> clauses, const SymbolTable& symbols) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / watchlist_file_name(id, source), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write watchlist " + std::to_string(id));
  for (std::size_t i = 0; i < clauses.size(); ++i)
    out << serialize_clause(clauses[i], symbols, "w" + std::to_string(i), Role::Plain) << '\n';
}

struct WatchlistFile {
  int id = 0;
  std::string source;
  std::filesystem::path path;
};

inline std::vector<WatchlistFile> list_watchlist_dir(const std::filesystem::path& dir) {
  std::vector<WatchlistFile> files;
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("watchlist directory not found: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".w") continue;
    std::string stem = e.path().stem().string();
    auto us = stem.find('_');
    if (us == std::string::npos || us == 0) continue;
    WatchlistFile f;
    try {
      f.id = std::stoi(stem.substr(0, us));
    } catch (const std::exception&) {
      continue;
    }
    f.source = stem.substr(us + 1);
    f.path = e.path();
    files.push_back(std::move(f));
  }
  std::sort(files.begin(), files.end(),
            [](const WatchlistFile& a, const WatchlistFile& b) { return a.id < b.id; });
  return files;
}

inline Watchlist parse_watchlist(const WatchlistFile& f, std::string_view text,
                                 SymbolTable& symbols) {
  Watchlist w;
  w.id = f.id;
  w.source = f.source;
  for (auto& nc : parse_clauses(text, symbols)) {
    Clause c = std::move(nc.clause);
    c.set_id(static_cast<ClauseId>(w.clauses.size()));
    c.set_origin(Origin{OriginKind::WatchlistLoaded, InferenceRule::None, {}, {}});
    w.clauses.push_back(std::move(c));
  }
  if (w.clauses.empty()) throw std::runtime_error("empty watchlist " + f.path.string());
  return w;
}

inline std::vector<Watchlist> load_watchlists(const std::filesystem::path& dir,
                                              SymbolTable& symbols) {
  std::vector<Watchlist> out;
  for (const auto& f : list_watchlist_dir(dir)) out.push_back(parse_watchlist(f, read_file(f.path.string()), symbols));
  return out;
}

}  // namespace hintgrind
