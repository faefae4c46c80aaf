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

// Clause featurization for the learned evaluation.
//
// A clause is described by vertical walks of three nodes through each of its
// literal trees plus four count features. Features are hashed into
// [0, hash_base); the features of the problem's negated conjecture occupy a
// second block [hash_base, 2 * hash_base) and watchlist completion ratios
// follow verbatim after that.
//
// Walk encoding: the root of a literal tree is its signed predicate (`+p`,
// `-p`); variables become VAR and `skolem_*` symbols become SKO. A walk starts
// at the root and at every other node that has arguments, and runs down three
// nodes; walks that hit a leaf early are padded with END.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hintgrind/common.hpp"
#include "hintgrind/logic.hpp"
#include "hintgrind/tptp.hpp"

namespace hintgrind {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a_update(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view bytes) { return fnv1a_update(kFnvOffset, bytes); }

inline std::uint32_t hash_feature(std::string_view feature, std::uint32_t base) {
  return static_cast<std::uint32_t>(fnv1a(feature) & (base - 1));
}

inline constexpr std::string_view kVarToken = "VAR";
inline constexpr std::string_view kSkolemToken = "SKO";
inline constexpr std::string_view kEndToken = "END";
inline constexpr std::string_view kLiteralsFeature = "#lits";
inline constexpr std::string_view kPositiveFeature = "#pos";
inline constexpr std::string_view kSymbolsFeature = "#syms";
inline constexpr std::string_view kDepthFeature = "#depth";

struct FeatureConfig {
  std::uint32_t hash_base = 1u << 15;
  std::uint32_t watchlist_count = 0;

  std::uint32_t dim() const { return 2 * hash_base + watchlist_count; }
  void validate() const {
    if (hash_base < 256 || (hash_base & (hash_base - 1)) != 0)
      throw ConfigError("hash base must be a power of two >= 256");
  }
};

// Sparse entries sorted by index, no duplicates, no explicit zeros.
struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  double get(std::uint32_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, std::uint32_t i) { return e.first < i; });
    return it != entries.end() && it->first == index ? it->second : 0.0;
  }
};

// Multiset of feature strings.
using FeatureBag = std::map<std::string, double>;

namespace detail {

inline std::string_view walk_token(const SymbolTable& symbols, const TermNode& n) {
  if (n.is_var()) return kVarToken;
  const std::string& name = symbols.name(n.symbol);
  if (name.starts_with("skolem_")) return kSkolemToken;
  return name;
}

struct ClauseShape {
  int literals = 0;
  int positive = 0;
  int symbols = 0;
  int depth = 0;
};

inline int term_height(TermView t, std::size_t pos) {
  int h = 0;
  for_each_arg(t, pos, [&](std::size_t c) { h = std::max(h, term_height(t, c)); });
  return h + 1;
}

inline ClauseShape shape_of(const Clause& c) {
  ClauseShape s;
  for (const auto& l : c.literals()) {
    ++s.literals;
    s.positive += l.positive ? 1 : 0;
    for (const auto& n : l.atom) s.symbols += n.is_var() ? 0 : 1;
    s.depth = std::max(s.depth, term_height(l.view(), 0));
  }
  return s;
}

// Calls emit(a, b, c) for every walk of the clause.
template <typename Emit>
void for_each_walk(const Clause& c, const SymbolTable& symbols, Emit&& emit) {
  std::string root;
  for (const auto& l : c.literals()) {
    TermView t = l.view();
    root.assign(l.positive ? "+" : "-");
    root += symbols.name(l.predicate());
    for (std::size_t pos = 0; pos < t.size(); ++pos) {
      if (pos != 0 && t[pos].size == 1) continue;  // leaves start no walk
      std::string_view first = pos == 0 ? std::string_view(root) : walk_token(symbols, t[pos]);
      if (t[pos].size == 1) {
        emit(first, kEndToken, kEndToken);
        continue;
      }
      for_each_arg(t, pos, [&](std::size_t child) {
        std::string_view second = walk_token(symbols, t[child]);
        if (t[child].size == 1) {
          emit(first, second, kEndToken);
          return;
        }
        for_each_arg(t, child, [&](std::size_t grand) {
          emit(first, second, walk_token(symbols, t[grand]));
        });
      });
    }
  }
}

inline void add_entry(std::vector<std::pair<std::uint32_t, double>>& raw, std::uint32_t index,
                      double value) {
  raw.emplace_back(index, value);
}

// Sorts, sums duplicates and drops zeros.
inline void compact(std::vector<std::pair<std::uint32_t, double>>& raw) {
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < raw.size();) {
    std::uint32_t idx = raw[i].first;
    double sum = 0;
    for (; i < raw.size() && raw[i].first == idx; ++i) sum += raw[i].second;
    if (sum != 0.0) raw[out++] = {idx, sum};
  }
  raw.resize(out);
}

}  // namespace detail

inline FeatureBag extract_walks(const Clause& c, const SymbolTable& symbols) {
  FeatureBag bag;
  detail::for_each_walk(c, symbols, [&](std::string_view a, std::string_view b, std::string_view d) {
    std::string f;
    f.reserve(a.size() + b.size() + d.size() + 2);
    f.append(a).append("/").append(b).append("/").append(d);
    bag[f] += 1.0;
  });
  auto s = detail::shape_of(c);
  bag[std::string(kLiteralsFeature)] += s.literals;
  bag[std::string(kPositiveFeature)] += s.positive;
  bag[std::string(kSymbolsFeature)] += s.symbols;
  bag[std::string(kDepthFeature)] += s.depth;
  return bag;
}

// Hashes a feature bag into `offset + [0, base)`.
inline void hash_bag_into(const FeatureBag& bag, std::uint32_t base, std::uint32_t offset,
                          std::vector<std::pair<std::uint32_t, double>>& raw) {
  for (const auto& [f, v] : bag) detail::add_entry(raw, offset + hash_feature(f, base), v);
}

// Same result as hashing extract_walks(c), without building the strings.
inline void hash_clause_into(const Clause& c, const SymbolTable& symbols, std::uint32_t base,
                             std::vector<std::pair<std::uint32_t, double>>& raw) {
  const std::uint64_t mask = base - 1;
  detail::for_each_walk(c, symbols, [&](std::string_view a, std::string_view b, std::string_view d) {
    std::uint64_t h = fnv1a_update(kFnvOffset, a);
    h = fnv1a_update(h, "/");
    h = fnv1a_update(h, b);
    h = fnv1a_update(h, "/");
    h = fnv1a_update(h, d);
    detail::add_entry(raw, static_cast<std::uint32_t>(h & mask), 1.0);
  });
  auto s = detail::shape_of(c);
  detail::add_entry(raw, hash_feature(kLiteralsFeature, base), s.literals);
  detail::add_entry(raw, hash_feature(kPositiveFeature, base), s.positive);
  detail::add_entry(raw, hash_feature(kSymbolsFeature, base), s.symbols);
  detail::add_entry(raw, hash_feature(kDepthFeature, base), s.depth);
}

// Union (multiset sum) of the walks of all negated_conjecture clauses.
inline FeatureBag conjecture_features(const Problem& p) {
  FeatureBag bag;
  for (const auto& nc : p.clauses) {
    if (nc.role != Role::NegatedConjecture) continue;
    for (const auto& [f, v] : extract_walks(nc.clause, *p.symbols)) bag[f] += v;
  }
  return bag;
}

// The conjecture block, already hashed and shifted; computed once per problem.
struct ConjectureBlock {
  std::vector<std::pair<std::uint32_t, double>> entries;

  static ConjectureBlock of(const FeatureBag& conj, std::uint32_t base) {
    ConjectureBlock b;
    hash_bag_into(conj, base, base, b.entries);
    detail::compact(b.entries);
    return b;
  }
};

inline SparseVector build_vector(const Clause& c, const SymbolTable& symbols,
                                 const ConjectureBlock& conj, std::span<const double> psv,
                                 const FeatureConfig& cfg) {
  if (psv.size() != cfg.watchlist_count)
    throw ConfigError("proof-state vector has " + std::to_string(psv.size()) +
                      " entries, expected " + std::to_string(cfg.watchlist_count));
  SparseVector v;
  v.dim = cfg.dim();
  hash_clause_into(c, symbols, cfg.hash_base, v.entries);
  detail::compact(v.entries);
  v.entries.insert(v.entries.end(), conj.entries.begin(), conj.entries.end());
  for (std::size_t i = 0; i < psv.size(); ++i)
    if (psv[i] != 0.0) v.entries.emplace_back(2 * cfg.hash_base + static_cast<std::uint32_t>(i), psv[i]);
  return v;
}

inline SparseVector build_vector(const Clause& c, const SymbolTable& symbols,
                                 const FeatureBag& conj, std::span<const double> psv,
                                 const FeatureConfig& cfg) {
  return build_vector(c, symbols, ConjectureBlock::of(conj, cfg.hash_base), psv, cfg);
}

// Training example line: `<label> <index>:<value> ...`, indices increasing.
inline std::string format_example(int label, const SparseVector& v) {
  std::string out = label ? "1" : "0";
  for (const auto& [i, x] : v.entries) {
    out += ' ';
    out += std::to_string(i);
    out += ':';
    out += format_double(x);
  }
  return out;
}

struct Example {
  SparseVector vector;
  int label = 0;
};

inline Example parse_example(std::string_view line, std::uint32_t dim = 0) {
  Example ex;
  ex.vector.dim = dim;
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    return line.substr(start, pos - start);
  };
  auto label = next_token();
  if (label != "0" && label != "1") throw std::runtime_error("bad example label '" + std::string(label) + "'");
  ex.label = label == "1" ? 1 : 0;
  long long last = -1;
  for (auto tok = next_token(); !tok.empty(); tok = next_token()) {
    auto colon = tok.find(':');
    if (colon == std::string_view::npos) throw std::runtime_error("bad example entry '" + std::string(tok) + "'");
    long long idx = parse_int(tok.substr(0, colon));
    if (idx <= last) throw std::runtime_error("example indices must increase");
    if (dim != 0 && idx >= dim) throw std::runtime_error("example index out of range");
    last = idx;
    double v = parse_double(tok.substr(colon + 1));
    if (v != 0.0) ex.vector.entries.emplace_back(static_cast<std::uint32_t>(idx), v);
  }
  return ex;
}

}  // namespace hintgrind
