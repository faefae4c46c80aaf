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

// First-order terms, literals and clauses with one-sided matching and
// clause subsumption.
//
// Terms are stored flat, in preorder. Every node carries the size of the
// subterm rooted at it, so a subterm is a contiguous span and skipping it is
// O(1). Symbols are small non-negative integers handed out by a SymbolTable;
// variables are encoded as negative numbers (~v).

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hintgrind {

using SymbolId = std::int32_t;
using VarId = std::int32_t;
using ClauseId = std::int64_t;

enum class SymbolKind : std::uint8_t { Predicate, Function };

struct SymbolInfo {
  std::string name;
  int arity = 0;
  SymbolKind kind = SymbolKind::Function;
};

// Symbols are keyed by (name, arity, kind). Arity consistency inside one
// problem is checked by the parser, not here.
class SymbolTable {
 public:
  SymbolId intern(std::string_view name, int arity, SymbolKind kind) {
    auto key = make_key(name, arity, kind);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    auto id = static_cast<SymbolId>(infos_.size());
    infos_.push_back(SymbolInfo{std::string(name), arity, kind});
    ids_.emplace(std::move(key), id);
    return id;
  }

  std::optional<SymbolId> find(std::string_view name, int arity,
                               SymbolKind kind) const {
    auto it = ids_.find(make_key(name, arity, kind));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const SymbolInfo& info(SymbolId id) const { return infos_.at(static_cast<std::size_t>(id)); }
  const std::string& name(SymbolId id) const { return info(id).name; }
  std::size_t size() const { return infos_.size(); }

 private:
  static std::string make_key(std::string_view name, int arity, SymbolKind kind) {
    std::string key(name);
    key += '/';
    key += std::to_string(arity);
    key += kind == SymbolKind::Predicate ? 'p' : 'f';
    return key;
  }

  std::vector<SymbolInfo> infos_;
  std::unordered_map<std::string, SymbolId> ids_;
};

struct TermNode {
  std::int32_t symbol;  // >= 0: symbol id, < 0: variable ~symbol
  std::uint32_t size;   // nodes in the subterm rooted here

  bool is_var() const { return symbol < 0; }
  VarId var() const { return ~symbol; }
  friend bool operator==(const TermNode&, const TermNode&) = default;
};

inline TermNode var_node(VarId v) { return TermNode{~v, 1}; }

using TermView = std::span<const TermNode>;

inline TermView subterm(TermView t, std::size_t pos) { return t.subspan(pos, t[pos].size); }

inline bool same_term(TermView a, TermView b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Calls fn(position) for every direct argument of the term rooted at `pos`.
template <typename Fn>
void for_each_arg(TermView t, std::size_t pos, Fn&& fn) {
  std::size_t end = pos + t[pos].size;
  for (std::size_t child = pos + 1; child < end; child += t[child].size) fn(child);
}

class Term {
 public:
  Term() = default;
  explicit Term(std::vector<TermNode> nodes) : nodes_(std::move(nodes)) {}
  explicit Term(TermView view) : nodes_(view.begin(), view.end()) {}

  static Term variable(VarId v) { return Term(std::vector<TermNode>{var_node(v)}); }

  static Term app(SymbolId f, std::span<const Term> args = {}) {
    std::vector<TermNode> nodes;
    nodes.push_back(TermNode{f, 1});
    for (const auto& a : args) nodes.insert(nodes.end(), a.nodes_.begin(), a.nodes_.end());
    nodes[0].size = static_cast<std::uint32_t>(nodes.size());
    return Term(std::move(nodes));
  }
  static Term app(SymbolId f, std::initializer_list<Term> args) {
    return app(f, std::span<const Term>(args.begin(), args.size()));
  }

  TermView view() const { return nodes_; }
  const std::vector<TermNode>& nodes() const { return nodes_; }
  bool is_var() const { return nodes_.size() == 1 && nodes_[0].is_var(); }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  std::vector<TermNode> nodes_;
};

// Finite map from variables to terms. Identity bindings are never stored.
class Substitution {
 public:
  void bind(VarId v, Term t) {
    if (t.is_var() && t.view()[0].var() == v) {
      bindings_.erase(v);
      return;
    }
    bindings_.insert_or_assign(v, std::move(t));
  }
  const Term* lookup(VarId v) const {
    auto it = bindings_.find(v);
    return it == bindings_.end() ? nullptr : &it->second;
  }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<VarId, Term>& bindings() const { return bindings_; }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<VarId, Term> bindings_;
};

namespace detail {

inline void apply_into(TermView t, std::size_t pos, const Substitution& s,
                       std::vector<TermNode>& out) {
  const TermNode& n = t[pos];
  if (n.is_var()) {
    if (const Term* image = s.lookup(n.var())) {
      out.insert(out.end(), image->nodes().begin(), image->nodes().end());
    } else {
      out.push_back(n);
    }
    return;
  }
  std::size_t at = out.size();
  out.push_back(TermNode{n.symbol, 1});
  for_each_arg(t, pos, [&](std::size_t c) { apply_into(t, c, s, out); });
  out[at].size = static_cast<std::uint32_t>(out.size() - at);
}

}  // namespace detail

inline Term apply_substitution(TermView t, const Substitution& s) {
  if (s.empty()) return Term(t);
  std::vector<TermNode> out;
  out.reserve(t.size());
  detail::apply_into(t, 0, s, out);
  return Term(std::move(out));
}

inline Term apply_substitution(const Term& t, const Substitution& s) {
  return apply_substitution(t.view(), s);
}

// An atom is stored as a term whose root symbol is the predicate.
struct Literal {
  bool positive = true;
  std::vector<TermNode> atom;

  SymbolId predicate() const { return atom[0].symbol; }
  TermView view() const { return atom; }

  static Literal make(bool positive, SymbolId predicate, std::span<const Term> args = {}) {
    Term t = Term::app(predicate, args);
    return Literal{positive, t.nodes()};
  }
  static Literal make(bool positive, SymbolId predicate, std::initializer_list<Term> args) {
    return make(positive, predicate, std::span<const Term>(args.begin(), args.size()));
  }

  friend bool operator==(const Literal&, const Literal&) = default;
};

inline std::int32_t signed_predicate(const Literal& l) {
  return l.predicate() * 2 + (l.positive ? 0 : 1);
}

enum class OriginKind : std::uint8_t { Input, Derived, WatchlistLoaded };
enum class InferenceRule : std::uint8_t { None, Resolution, Factoring };

// For Resolution: parents = {given side, partner}, positions = their literal
// indices. For Factoring: parents = {parent}, positions = the unified pair.
struct Origin {
  OriginKind kind = OriginKind::Input;
  InferenceRule rule = InferenceRule::None;
  std::vector<ClauseId> parents;
  std::vector<int> positions;
};

// A clause is a set of literals. Construction renames variables to 0, 1, ...
// by first occurrence and drops duplicate literals, so variants that agree
// up to renaming and literal order-of-first-appearance are identical.
class Clause {
 public:
  Clause() = default;
  explicit Clause(std::vector<Literal> literals, ClauseId id = -1, Origin origin = {})
      : id_(id), origin_(std::move(origin)) {
    normalize(std::move(literals));
  }

  ClauseId id() const { return id_; }
  void set_id(ClauseId id) { id_ = id; }
  const Origin& origin() const { return origin_; }
  void set_origin(Origin o) { origin_ = std::move(o); }

  const std::vector<Literal>& literals() const { return literals_; }
  std::size_t size() const { return literals_.size(); }
  bool empty() const { return literals_.empty(); }
  int num_vars() const { return num_vars_; }

  // Structural equality; ids and origins are ignored.
  bool same_literals(const Clause& o) const { return literals_ == o.literals_; }

 private:
  void normalize(std::vector<Literal> lits) {
    std::unordered_map<VarId, VarId> rename;
    for (auto& l : lits) {
      for (auto& n : l.atom) {
        if (!n.is_var()) continue;
        auto [it, inserted] = rename.try_emplace(n.var(), static_cast<VarId>(rename.size()));
        n.symbol = ~it->second;
      }
    }
    num_vars_ = static_cast<int>(rename.size());
    literals_.reserve(lits.size());
    for (auto& l : lits) {
      if (std::find(literals_.begin(), literals_.end(), l) == literals_.end())
        literals_.push_back(std::move(l));
    }
  }

  ClauseId id_ = -1;
  std::vector<Literal> literals_;
  int num_vars_ = 0;
  Origin origin_;
};

// Sorted set of signed predicates (2 * predicate + (negative ? 1 : 0)).
class ClauseCode {
 public:
  ClauseCode() = default;
  explicit ClauseCode(std::vector<std::int32_t> keys) : keys_(std::move(keys)) {
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  }

  const std::vector<std::int32_t>& keys() const { return keys_; }
  bool empty() const { return keys_.empty(); }
  bool subset_of(const ClauseCode& o) const {
    return std::includes(o.keys_.begin(), o.keys_.end(), keys_.begin(), keys_.end());
  }
  bool contains(bool positive, SymbolId predicate) const {
    return std::binary_search(keys_.begin(), keys_.end(), predicate * 2 + (positive ? 0 : 1));
  }

  friend bool operator==(const ClauseCode&, const ClauseCode&) = default;
  friend auto operator<=>(const ClauseCode&, const ClauseCode&) = default;

 private:
  std::vector<std::int32_t> keys_;
};

struct ClauseCodeHash {
  std::size_t operator()(const ClauseCode& c) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto k : c.keys()) h = (h ^ static_cast<std::size_t>(k)) * 1099511628211ull;
    return h;
  }
};

inline ClauseCode clause_code(const Clause& c) {
  std::vector<std::int32_t> keys;
  keys.reserve(c.size());
  for (const auto& l : c.literals()) keys.push_back(signed_predicate(l));
  return ClauseCode(std::move(keys));
}

inline Literal apply_substitution(const Literal& l, const Substitution& s) {
  return Literal{l.positive, apply_substitution(l.view(), s).nodes()};
}

inline Clause apply_substitution(const Clause& c, const Substitution& s) {
  std::vector<Literal> lits;
  lits.reserve(c.size());
  for (const auto& l : c.literals()) lits.push_back(apply_substitution(l, s));
  return Clause(std::move(lits), c.id(), c.origin());
}

// ---------------------------------------------------------------------------
// One-sided matching. Pattern variables bind to spans of the target; target
// variables behave like constants.

class MatchBindings {
 public:
  explicit MatchBindings(int num_vars = 0) : bound_(static_cast<std::size_t>(num_vars)) {}

  void reset(int num_vars) {
    bound_.assign(static_cast<std::size_t>(num_vars), TermView{});
    trail_.clear();
  }
  void preset(VarId v, TermView t) {
    auto i = static_cast<std::size_t>(v);
    if (i >= bound_.size()) bound_.resize(i + 1);
    bound_[i] = t;
  }
  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t m) {
    while (trail_.size() > m) {
      bound_[static_cast<std::size_t>(trail_.back())] = TermView{};
      trail_.pop_back();
    }
  }

  bool match(TermView pattern, TermView target) {
    if (pattern.size() > target.size()) return false;
    std::size_t i = 0, j = 0;
    while (i < pattern.size()) {
      const TermNode& p = pattern[i];
      if (p.is_var()) {
        auto v = static_cast<std::size_t>(p.var());
        if (v >= bound_.size()) bound_.resize(v + 1);
        TermView t = subterm(target, j);
        if (bound_[v].data() == nullptr) {
          bound_[v] = t;
          trail_.push_back(p.var());
        } else if (!same_term(bound_[v], t)) {
          return false;
        }
        ++i;
        j += t.size();
      } else {
        if (j >= target.size() || target[j].symbol != p.symbol) return false;
        ++i;
        ++j;
      }
    }
    return true;
  }

  Substitution to_substitution() const {
    Substitution s;
    for (std::size_t v = 0; v < bound_.size(); ++v)
      if (bound_[v].data() != nullptr) s.bind(static_cast<VarId>(v), Term(bound_[v]));
    return s;
  }

 private:
  std::vector<TermView> bound_;
  std::vector<VarId> trail_;
};

inline std::optional<Substitution> match_literal(const Literal& pattern, const Literal& target,
                                                 const Substitution& s = {}) {
  if (pattern.positive != target.positive || pattern.predicate() != target.predicate())
    return std::nullopt;
  MatchBindings b;
  for (const auto& [v, t] : s.bindings()) b.preset(v, t.view());
  if (!b.match(pattern.view(), target.view())) return std::nullopt;
  return b.to_substitution();
}

namespace detail {

inline int ground_symbols(const Literal& l) {
  int n = 0;
  for (const auto& node : l.atom) n += node.is_var() ? 0 : 1;
  return n;
}

class Subsumer {
 public:
  Subsumer(const Clause& c, const Clause& d) : c_(c), d_(d), bindings_(c.num_vars()) {}

  bool run() {
    const auto& cl = c_.literals();
    const auto& dl = d_.literals();
    order_.resize(cl.size());
    for (std::size_t i = 0; i < cl.size(); ++i) order_[i] = i;
    // Most instantiated literals first; they prune hardest.
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      int ga = ground_symbols(cl[a]), gb = ground_symbols(cl[b]);
      if (ga != gb) return ga > gb;
      return cl[a].atom.size() > cl[b].atom.size();
    });
    candidates_.assign(cl.size(), {});
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const Literal& l = cl[order_[k]];
      for (std::size_t j = 0; j < dl.size(); ++j) {
        const Literal& m = dl[j];
        if (m.positive == l.positive && m.predicate() == l.predicate() &&
            m.atom.size() >= l.atom.size())
          candidates_[k].push_back(j);
      }
      if (candidates_[k].empty()) return false;
    }
    return search(0);
  }

  Substitution witness() const { return bindings_.to_substitution(); }

 private:
  bool search(std::size_t k) {
    if (k == order_.size()) return true;
    const Literal& l = c_.literals()[order_[k]];
    for (std::size_t j : candidates_[k]) {
      auto m = bindings_.mark();
      if (bindings_.match(l.view(), d_.literals()[j].view()) && search(k + 1)) return true;
      bindings_.undo(m);
    }
    return false;
  }

  const Clause& c_;
  const Clause& d_;
  MatchBindings bindings_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> candidates_;
};

}  // namespace detail

// Returns sigma with C sigma a subset of D, if one exists. Several literals of
// C may map onto the same literal of D.
inline std::optional<Substitution> subsumes(const Clause& c, const Clause& d) {
  detail::Subsumer s(c, d);
  if (!s.run()) return std::nullopt;
  return s.witness();
}

inline bool subsumes_check(const Clause& c, const Clause& d) {
  detail::Subsumer s(c, d);
  return s.run();
}

// Symbol-count weight: 2 per literal plus one per term node.
inline double symbol_weight(const Clause& c) {
  double w = 0;
  for (const auto& l : c.literals()) w += 2.0 + static_cast<double>(l.atom.size());
  return w;
}

inline bool is_tautology(const Clause& c) {
  const auto& ls = c.literals();
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = i + 1; j < ls.size(); ++j)
      if (ls[i].positive != ls[j].positive && ls[i].atom == ls[j].atom) return true;
  return false;
}

}  // namespace hintgrind
