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

// Given-clause saturation with binary resolution and positive factoring.
//
// The unprocessed set is a heap ordered by (priority, weight, clause id).
// Priorities and weights come from a Guidance object, which also owns the
// watchlists and the learned model for one search.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hintgrind/common.hpp"
#include "hintgrind/features.hpp"
#include "hintgrind/learner.hpp"
#include "hintgrind/logic.hpp"
#include "hintgrind/proofwatch.hpp"
#include "hintgrind/tptp.hpp"

namespace hintgrind {

// ---------------------------------------------------------------------------
// Two-sided unification over flat terms. Each term lives on a side (0 or 1)
// so the two premises of a resolution step never share variables.

namespace detail {

class Unifier {
 public:
  struct Ref {
    const TermNode* t = nullptr;
    int side = 0;
  };

  void reset(int vars0, int vars1) {
    bound_[0].assign(static_cast<std::size_t>(vars0), Ref{});
    bound_[1].assign(static_cast<std::size_t>(vars1), Ref{});
    trail_.clear();
  }

  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t m) {
    while (trail_.size() > m) {
      auto [side, v] = trail_.back();
      bound_[side][static_cast<std::size_t>(v)] = Ref{};
      trail_.pop_back();
    }
  }

  bool unify(Ref a, Ref b) {
    a = deref(a);
    b = deref(b);
    if (a.t->is_var()) {
      if (b.t->is_var() && a.side == b.side && a.t->var() == b.t->var()) return true;
      return bind(a, b);
    }
    if (b.t->is_var()) return bind(b, a);
    if (a.t->symbol != b.t->symbol) return false;
    const TermNode* ca = a.t + 1;
    const TermNode* cb = b.t + 1;
    const TermNode* end = a.t + a.t->size;
    while (ca != end) {
      if (!unify(Ref{ca, a.side}, Ref{cb, b.side})) return false;
      ca += ca->size;
      cb += cb->size;
    }
    return true;
  }

  // Writes the instance of `r`; unbound variables of side 1 are shifted by
  // `offset` so they stay apart from those of side 0.
  void apply(Ref r, VarId offset, std::vector<TermNode>& out) const {
    r = deref(r);
    if (r.t->is_var()) {
      out.push_back(var_node(r.t->var() + (r.side == 1 ? offset : 0)));
      return;
    }
    std::size_t at = out.size();
    out.push_back(TermNode{r.t->symbol, 1});
    const TermNode* c = r.t + 1;
    const TermNode* end = r.t + r.t->size;
    for (; c != end; c += c->size) apply(Ref{c, r.side}, offset, out);
    out[at].size = static_cast<std::uint32_t>(out.size() - at);
  }

 private:
  Ref deref(Ref r) const {
    while (r.t->is_var()) {
      const Ref& b = bound_[r.side][static_cast<std::size_t>(r.t->var())];
      if (b.t == nullptr) break;
      r = b;
    }
    return r;
  }

  bool occurs(int side, VarId v, Ref r) const {
    r = deref(r);
    if (r.t->is_var()) return r.side == side && r.t->var() == v;
    const TermNode* c = r.t + 1;
    const TermNode* end = r.t + r.t->size;
    for (; c != end; c += c->size)
      if (occurs(side, v, Ref{c, r.side})) return true;
    return false;
  }

  bool bind(Ref var, Ref t) {
    if (occurs(var.side, var.t->var(), t)) return false;
    bound_[var.side][static_cast<std::size_t>(var.t->var())] = t;
    trail_.emplace_back(var.side, var.t->var());
    return true;
  }

  std::vector<Ref> bound_[2];
  std::vector<std::pair<int, VarId>> trail_;
};

inline Literal instantiate(const Unifier& u, const Literal& l, int side, VarId offset) {
  Literal out;
  out.positive = l.positive;
  out.atom.reserve(l.atom.size());
  u.apply(Unifier::Ref{l.atom.data(), side}, offset, out.atom);
  return out;
}

// Resolvent of g[i] (side 0) against d[j] (side 1), if the atoms unify.
inline std::optional<Clause> resolve(Unifier& u, const Clause& g, std::size_t i, const Clause& d,
                                     std::size_t j) {
  const Literal& a = g.literals()[i];
  const Literal& b = d.literals()[j];
  if (a.positive == b.positive || a.predicate() != b.predicate()) return std::nullopt;
  u.reset(g.num_vars(), d.num_vars());
  if (!u.unify({a.atom.data(), 0}, {b.atom.data(), 1})) return std::nullopt;
  std::vector<Literal> lits;
  lits.reserve(g.size() + d.size() - 2);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (k != i) lits.push_back(instantiate(u, g.literals()[k], 0, g.num_vars()));
  for (std::size_t k = 0; k < d.size(); ++k)
    if (k != j) lits.push_back(instantiate(u, d.literals()[k], 1, g.num_vars()));
  return Clause(std::move(lits), -1,
                Origin{OriginKind::Derived, InferenceRule::Resolution, {g.id(), d.id()},
                       {static_cast<int>(i), static_cast<int>(j)}});
}

// Factor of g merging positive literals i < j.
inline std::optional<Clause> factor(Unifier& u, const Clause& g, std::size_t i, std::size_t j) {
  const Literal& a = g.literals()[i];
  const Literal& b = g.literals()[j];
  if (!a.positive || !b.positive || a.predicate() != b.predicate()) return std::nullopt;
  u.reset(g.num_vars(), 0);
  if (!u.unify({a.atom.data(), 0}, {b.atom.data(), 0})) return std::nullopt;
  std::vector<Literal> lits;
  lits.reserve(g.size() - 1);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (k != j) lits.push_back(instantiate(u, g.literals()[k], 0, 0));
  return Clause(std::move(lits), -1,
                Origin{OriginKind::Derived, InferenceRule::Factoring, {g.id()},
                       {static_cast<int>(i), static_cast<int>(j)}});
}

inline void keep(std::optional<Clause>&& c, std::vector<Clause>& out) {
  if (c && !is_tautology(*c)) out.push_back(std::move(*c));
}

// Inferences of g with itself: self-resolution (positive literal first, so
// each pair is tried once) and positive factoring.
inline void generate_self(Unifier& u, const Clause& g, std::vector<Clause>& out) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.literals()[i].positive) continue;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (!g.literals()[j].positive) keep(resolve(u, g, i, g, j), out);
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) keep(factor(u, g, i, j), out);
}

}  // namespace detail

// All resolvents of g with the clauses of p and with itself, then all
// factors of g. Tautologies are dropped; ids are left unset.
inline std::vector<Clause> generate(const Clause& g, std::span<const Clause> p) {
  detail::Unifier u;
  std::vector<Clause> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const Clause& d : p)
      for (std::size_t j = 0; j < d.size(); ++j) detail::keep(detail::resolve(u, g, i, d, j), out);
  detail::generate_self(u, g, out);
  return out;
}

// ---------------------------------------------------------------------------
// Configuration and results.

struct Limits {
  int time_limit_s = 60;
  std::int64_t generated_limit = 10000;

  // `T<seconds>-G<count>`, both positive.
  static Limits parse(std::string_view s) {
    auto dash = s.find('-');
    if (s.size() < 5 || s[0] != 'T' || dash == std::string_view::npos || dash + 1 >= s.size() ||
        s[dash + 1] != 'G')
      throw ConfigError("limit must look like T60-G10000, got '" + std::string(s) + "'");
    Limits l;
    try {
      l.time_limit_s = static_cast<int>(parse_int(s.substr(1, dash - 1)));
      l.generated_limit = parse_int(s.substr(dash + 2));
    } catch (const std::exception&) {
      throw ConfigError("limit must look like T60-G10000, got '" + std::string(s) + "'");
    }
    if (l.time_limit_s <= 0 || l.generated_limit <= 0) throw ConfigError("limits must be positive");
    return l;
  }

  std::string str() const {
    return "T" + std::to_string(time_limit_s) + "-G" + std::to_string(generated_limit);
  }
};

struct SearchConfig {
  Limits limits;
  bool forward_subsumption = true;
  bool record_trace = true;
};

enum class Verdict : std::uint8_t { Proof, Saturated, ResourceOut };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proof: return "proof";
    case Verdict::Saturated: return "saturated";
    case Verdict::ResourceOut: return "resource_out";
  }
  return "?";
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Proof: return 0;
    case Verdict::Saturated: return 1;
    case Verdict::ResourceOut: return 2;
  }
  return 3;
}

struct TraceStep {
  ClauseId given = -1;
  bool positive = false;
  std::vector<double> psv;  // completion ratios when the clause was selected
};

struct SearchStats {
  std::int64_t processed = 0;
  std::int64_t generated = 0;
  std::int64_t forward_subsumed = 0;
  std::int64_t forward_subsumption_calls = 0;
  std::int64_t elapsed_ms = 0;
  IndexStats watch;
};

struct SearchResult {
  Verdict verdict = Verdict::Saturated;
  SearchStats stats;
  std::vector<TraceStep> trace;
  std::vector<Clause> given;         // given clauses in trace order (when tracing)
  std::vector<Clause> proof;         // ancestors of the empty clause by id, empty clause last
  std::vector<int> watchlist_ids;    // order of the proof-state vector
};

// ---------------------------------------------------------------------------
// Clause evaluation for one search.

struct Evaluation {
  int priority = 0;
  double weight = 0.0;
};

class Guidance {
 public:
  // Loads watchlists. With `use_priority` matching clauses are preferred by
  // relevance; otherwise the lists only feed the proof-state vector.
  void set_watchlists(const std::vector<Watchlist>& lists, std::shared_ptr<const SymbolTable> symbols,
                      bool use_priority, IndexMode mode = IndexMode::Multi) {
    watch_.emplace(lists, std::move(symbols), mode);
    watch_priority_ = use_priority;
  }

  void set_model(std::shared_ptr<const Model> model, const Problem& prob) {
    model_ = std::move(model);
    symbols_ = prob.symbols;
    conjecture_ = ConjectureBlock::of(conjecture_features(prob), model_->hash_base);
  }

  bool has_watchlists() const { return watch_.has_value(); }
  bool has_model() const { return model_ != nullptr; }

  // The model must have been trained on exactly the loaded watchlists.
  void validate() const {
    if (!model_) return;
    model_->layout().validate();
    std::size_t loaded = watch_ ? watch_->count() : 0;
    if (model_->watchlist_count != loaded)
      throw ConfigError("model expects " + std::to_string(model_->watchlist_count) +
                        " watchlists, " + std::to_string(loaded) + " loaded");
  }

  // Matches c against the watchlists and weighs it. Features see the proof
  // state before c's own matches are recorded.
  Evaluation evaluate(const Clause& c) {
    Evaluation e;
    double base = symbol_weight(c);
    if (model_) {
      std::vector<double> psv;
      if (watch_) psv = watch_->state().completion_ratios();
      SparseVector v = build_vector(c, *symbols_, conjecture_, psv, model_->layout());
      e.weight = clause_weight(model_->predict(v)) * base;
    } else {
      e.weight = base;
    }
    if (watch_) {
      auto rel = watch_->observe(c);
      e.priority = watch_priority_ ? watchlist_priority(rel) : kNoMatchPriority;
    } else {
      e.priority = kNoMatchPriority;
    }
    return e;
  }

  std::vector<double> proof_state() const {
    return watch_ ? watch_->state().completion_ratios() : std::vector<double>{};
  }
  std::vector<int> watchlist_ids() const { return watch_ ? watch_->ids() : std::vector<int>{}; }
  IndexStats watch_stats() const { return watch_ ? watch_->stats() : IndexStats{}; }
  const ProofWatch* watch() const { return watch_ ? &*watch_ : nullptr; }

 private:
  std::optional<ProofWatch> watch_;
  bool watch_priority_ = true;
  std::shared_ptr<const Model> model_;
  std::shared_ptr<const SymbolTable> symbols_;
  ConjectureBlock conjecture_;
};

// ---------------------------------------------------------------------------
// The loop.

namespace detail {

class Saturator {
 public:
  Saturator(const Problem& prob, const SearchConfig& cfg, Guidance& guidance)
      : prob_(prob), cfg_(cfg), guidance_(guidance) {}

  SearchResult run() {
    guidance_.validate();
    start_ = std::chrono::steady_clock::now();
    result_.watchlist_ids = guidance_.watchlist_ids();

    for (const auto& nc : prob_.clauses) {
      Clause c = nc.clause;
      c.set_origin(Origin{OriginKind::Input, InferenceRule::None, {}, {}});
      ClauseId id = store(std::move(c));
      if (store_[static_cast<std::size_t>(id)].empty()) return finish(Verdict::Proof, id);
      if (is_tautology(store_[static_cast<std::size_t>(id)])) continue;
      enqueue(id);
    }

    std::int64_t selections = 0;
    while (true) {
      if (queue_.empty()) return finish(Verdict::Saturated, -1);
      if (result_.stats.generated >= cfg_.limits.generated_limit) return finish(Verdict::ResourceOut, -1);
      if (selections % 64 == 0 && elapsed_ms() >= 1000ll * cfg_.limits.time_limit_s)
        return finish(Verdict::ResourceOut, -1);
      ++selections;

      ClauseId gid = queue_.top().id;
      queue_.pop();
      const Clause& g = store_[static_cast<std::size_t>(gid)];
      if (cfg_.forward_subsumption && subsumed_by_processed(g)) {
        ++result_.stats.forward_subsumed;
        continue;
      }
      if (cfg_.record_trace) {
        result_.trace.push_back(TraceStep{gid, false, guidance_.proof_state()});
        result_.given.push_back(g);
      }

      std::vector<Clause> fresh;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Literal& l = g.literals()[i];
        auto it = literals_.find(l.predicate() * 2 + (l.positive ? 1 : 0));
        if (it == literals_.end()) continue;
        for (auto [pid, j] : it->second)
          keep(resolve(unifier_, g, i, store_[static_cast<std::size_t>(pid)], static_cast<std::size_t>(j)),
               fresh);
      }
      generate_self(unifier_, g, fresh);
      add_processed(gid);

      for (auto& c : fresh) {
        ++result_.stats.generated;
        ClauseId id = store(std::move(c));
        if (store_[static_cast<std::size_t>(id)].empty()) return finish(Verdict::Proof, id);
        enqueue(id);
      }
    }
  }

 private:
  struct Entry {
    int priority;
    double weight;
    ClauseId id;
    bool operator>(const Entry& o) const {
      if (priority != o.priority) return priority > o.priority;
      if (weight != o.weight) return weight > o.weight;
      return id > o.id;
    }
  };

  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  ClauseId store(Clause c) {
    auto id = static_cast<ClauseId>(store_.size());
    c.set_id(id);
    store_.push_back(std::move(c));
    return id;
  }

  void enqueue(ClauseId id) {
    Evaluation e = guidance_.evaluate(store_[static_cast<std::size_t>(id)]);
    queue_.push(Entry{e.priority, e.weight, id});
  }

  bool subsumed_by_processed(const Clause& g) {
    ClauseCode code = clause_code(g);
    for (std::size_t k = 0; k < processed_.size(); ++k) {
      const Clause& p = store_[static_cast<std::size_t>(processed_[k])];
      if (!processed_codes_[k].subset_of(code)) continue;
      ++result_.stats.forward_subsumption_calls;
      if (subsumes_check(p, g)) return true;
    }
    return false;
  }

  void add_processed(ClauseId id) {
    const Clause& c = store_[static_cast<std::size_t>(id)];
    processed_.push_back(id);
    processed_codes_.push_back(clause_code(c));
    ++result_.stats.processed;
    for (std::size_t j = 0; j < c.size(); ++j)
      literals_[signed_predicate(c.literals()[j])].emplace_back(id, static_cast<int>(j));
  }

  SearchResult finish(Verdict v, ClauseId empty) {
    result_.verdict = v;
    result_.stats.elapsed_ms = elapsed_ms();
    result_.stats.watch = guidance_.watch_stats();
    if (v == Verdict::Proof) {
      std::vector<char> seen(store_.size(), 0);
      std::vector<ClauseId> stack{empty};
      seen[static_cast<std::size_t>(empty)] = 1;
      while (!stack.empty()) {
        ClauseId id = stack.back();
        stack.pop_back();
        for (ClauseId p : store_[static_cast<std::size_t>(id)].origin().parents) {
          if (!seen[static_cast<std::size_t>(p)]) {
            seen[static_cast<std::size_t>(p)] = 1;
            stack.push_back(p);
          }
        }
      }
      for (std::size_t id = 0; id < store_.size(); ++id)
        if (seen[id]) result_.proof.push_back(store_[id]);
      for (auto& step : result_.trace) step.positive = seen[static_cast<std::size_t>(step.given)] != 0;
    }
    return std::move(result_);
  }

  const Problem& prob_;
  const SearchConfig& cfg_;
  Guidance& guidance_;
  std::chrono::steady_clock::time_point start_;
  SearchResult result_;
  std::vector<Clause> store_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue_;
  std::vector<ClauseId> processed_;
  std::vector<ClauseCode> processed_codes_;
  // Processed literals by the signed predicate they resolve against.
  std::unordered_map<std::int32_t, std::vector<std::pair<ClauseId, int>>> literals_;
  Unifier unifier_;
};

}  // namespace detail

inline SearchResult given_clause_loop(const Problem& prob, const SearchConfig& cfg, Guidance& guidance) {
  detail::Saturator s(prob, cfg, guidance);
  return s.run();
}

inline SearchResult given_clause_loop(const Problem& prob, const SearchConfig& cfg) {
  Guidance none;
  return given_clause_loop(prob, cfg, none);
}

// Watchlist built from a proof: every proof clause except the empty one.
inline std::vector<Clause> proof_watchlist(const SearchResult& r) {
  std::vector<Clause> out;
  for (const auto& c : r.proof)
    if (!c.empty()) out.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// Trace files.
//
//   # problem <name>
//   # watchlists <n> <id> ...
//   <clause id> <pos|neg> <c_0> ... <c_n-1>
//
// The given clauses themselves go to a sidecar file of cnf lines named g<id>.

inline std::string format_trace(const std::string& problem, const SearchResult& r) {
  std::string out = "# problem " + problem + "\n# watchlists " + std::to_string(r.watchlist_ids.size());
  for (int id : r.watchlist_ids) out += " " + std::to_string(id);
  out += '\n';
  for (const auto& s : r.trace) {
    out += std::to_string(s.given);
    out += s.positive ? " pos" : " neg";
    for (double x : s.psv) {
      out += ' ';
      out += format_ratio(x);
    }
    out += '\n';
  }
  return out;
}

inline std::string format_given(const SearchResult& r, const SymbolTable& symbols) {
  std::string out;
  for (const auto& c : r.given) out += serialize_clause(c, symbols, "g" + std::to_string(c.id()), Role::Plain) + "\n";
  return out;
}

inline std::string format_proof(const SearchResult& r, const Problem& prob) {
  std::string out;
  for (const auto& c : r.proof) {
    Role role = Role::Plain;
    if (c.origin().kind == OriginKind::Input) role = prob.clauses[static_cast<std::size_t>(c.id())].role;
    out += serialize_clause(c, *prob.symbols, "c" + std::to_string(c.id()), role) + "\n";
  }
  return out;
}

struct Trace {
  std::string problem;
  std::vector<int> watchlist_ids;
  std::vector<TraceStep> steps;
};

inline Trace parse_trace(std::string_view text) {
  Trace t;
  bool have_header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> tok;
    for (std::size_t p = 0; p < line.size();) {
      while (p < line.size() && line[p] == ' ') ++p;
      std::size_t s = p;
      while (p < line.size() && line[p] != ' ') ++p;
      if (p > s) tok.push_back(line.substr(s, p - s));
    }
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + msg);
    };
    if (tok[0] == "#") {
      if (tok.size() >= 3 && tok[1] == "problem") {
        t.problem = std::string(tok[2]);
      } else if (tok.size() >= 3 && tok[1] == "watchlists") {
        auto n = static_cast<std::size_t>(parse_int(tok[2]));
        if (tok.size() != n + 3) fail("watchlist header count mismatch");
        for (std::size_t i = 0; i < n; ++i) t.watchlist_ids.push_back(static_cast<int>(parse_int(tok[3 + i])));
        have_header = true;
      }
      continue;
    }
    if (!have_header) fail("step before watchlist header");
    if (tok.size() != 2 + t.watchlist_ids.size()) fail("wrong number of ratios");
    TraceStep s;
    s.given = parse_int(tok[0]);
    if (tok[1] != "pos" && tok[1] != "neg") fail("label must be pos or neg");
    s.positive = tok[1] == "pos";
    for (std::size_t i = 2; i < tok.size(); ++i) s.psv.push_back(parse_double(tok[i]));
    t.steps.push_back(std::move(s));
  }
  if (!have_header) throw std::runtime_error("trace without watchlist header");
  return t;
}

}  // namespace hintgrind
