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

#include <map>
#include <set>

#include "hintgrind/saturation.hpp"
#include "support.hpp"

using namespace hintgrind;
using testing_support::clause_of;

namespace {

// A separate, tree-shaped unifier used to replay inferences.
struct Tree {
  int sym = 0;  // < 0: variable ~sym
  std::vector<Tree> args;
};

Tree to_tree(TermView t, std::size_t& pos, int offset) {
  const TermNode& n = t[pos++];
  Tree out;
  if (n.is_var()) {
    out.sym = ~(n.var() + offset);
    return out;
  }
  out.sym = n.symbol;
  std::size_t end = pos - 1 + n.size;
  while (pos < end) out.args.push_back(to_tree(t, pos, offset));
  return out;
}

using Bindings = std::map<int, Tree>;

Tree walk(const Tree& t, const Bindings& b) {
  if (t.sym < 0) {
    auto it = b.find(~t.sym);
    if (it != b.end()) return walk(it->second, b);
    return t;
  }
  Tree out{t.sym, {}};
  for (const auto& a : t.args) out.args.push_back(walk(a, b));
  return out;
}

bool occurs(int v, const Tree& t) {
  if (t.sym < 0) return ~t.sym == v;
  for (const auto& a : t.args)
    if (occurs(v, a)) return true;
  return false;
}

bool unify(const Tree& x, const Tree& y, Bindings& b) {
  Tree a = walk(x, b), c = walk(y, b);
  if (a.sym < 0 && c.sym < 0 && a.sym == c.sym) return true;
  if (a.sym < 0) {
    if (occurs(~a.sym, c)) return false;
    b[~a.sym] = c;
    return true;
  }
  if (c.sym < 0) return unify(c, a, b);
  if (a.sym != c.sym || a.args.size() != c.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify(a.args[i], c.args[i], b)) return false;
  return true;
}

void emit(const Tree& t, std::vector<TermNode>& out) {
  if (t.sym < 0) {
    out.push_back(var_node(~t.sym));
    return;
  }
  std::size_t at = out.size();
  out.push_back(TermNode{t.sym, 1});
  for (const auto& a : t.args) emit(a, out);
  out[at].size = static_cast<std::uint32_t>(out.size() - at);
}

Tree atom_tree(const Literal& l, int offset) {
  std::size_t pos = 0;
  return to_tree(l.view(), pos, offset);
}

Literal instantiate_tree(const Literal& l, int offset, const Bindings& b) {
  Literal out{l.positive, {}};
  emit(walk(atom_tree(l, offset), b), out.atom);
  return out;
}

std::optional<Clause> replay_resolution(const Clause& g, std::size_t i, const Clause& d, std::size_t j) {
  const Literal& a = g.literals()[i];
  const Literal& c = d.literals()[j];
  if (a.positive == c.positive || a.predicate() != c.predicate()) return std::nullopt;
  Bindings b;
  int off = g.num_vars();
  if (!unify(atom_tree(a, 0), atom_tree(c, off), b)) return std::nullopt;
  std::vector<Literal> lits;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (k != i) lits.push_back(instantiate_tree(g.literals()[k], 0, b));
  for (std::size_t k = 0; k < d.size(); ++k)
    if (k != j) lits.push_back(instantiate_tree(d.literals()[k], off, b));
  return Clause(std::move(lits));
}

std::optional<Clause> replay_factor(const Clause& g, std::size_t i, std::size_t j) {
  const Literal& a = g.literals()[i];
  const Literal& c = g.literals()[j];
  if (!a.positive || !c.positive || a.predicate() != c.predicate()) return std::nullopt;
  Bindings b;
  if (!unify(atom_tree(a, 0), atom_tree(c, 0), b)) return std::nullopt;
  std::vector<Literal> lits;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (k != j) lits.push_back(instantiate_tree(g.literals()[k], 0, b));
  return Clause(std::move(lits));
}

// Every inference the calculus allows, in the documented order.
std::vector<Clause> expected_inferences(const Clause& g, const std::vector<Clause>& p) {
  std::vector<Clause> out;
  auto add = [&](std::optional<Clause> c) {
    if (c && !is_tautology(*c)) out.push_back(std::move(*c));
  };
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto& d : p)
      for (std::size_t j = 0; j < d.size(); ++j) add(replay_resolution(g, i, d, j));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.literals()[i].positive)
      for (std::size_t j = 0; j < g.size(); ++j)
        if (!g.literals()[j].positive) add(replay_resolution(g, i, g, j));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) add(replay_factor(g, i, j));
  return out;
}

std::string pigeonhole(int holes) {
  std::string s;
  auto atom = [](int i, int j) { return "p_" + std::to_string(i) + "_" + std::to_string(j); };
  for (int i = 0; i <= holes; ++i) {
    s += "cnf(pigeon_" + std::to_string(i) + ", axiom, (";
    for (int j = 0; j < holes; ++j) s += (j ? " | " : "") + atom(i, j);
    s += ")).\n";
  }
  for (int j = 0; j < holes; ++j)
    for (int i = 0; i <= holes; ++i)
      for (int k = i + 1; k <= holes; ++k)
        s += "cnf(hole_" + std::to_string(j) + "_" + std::to_string(i) + "_" + std::to_string(k) + ", axiom, (~" +
             atom(i, j) + " | ~" + atom(k, j) + ")).\n";
  return s;
}

const char* kChain =
    "cnf(h, hypothesis, (p(a))).\n"
    "cnf(r, axiom, (~p(X) | p(f(X)))).\n"
    "cnf(g, negated_conjecture, (~p(f(f(a))))).\n";

}  // namespace

TEST(Generate, MatchesIndependentReplay) {
  SymbolTable t;
  auto sig = testing_support::Signature::make(t, 2, 2, 2);
  testing_support::ClauseGen gen(sig, 21);
  std::size_t total = 0;
  for (int round = 0; round < 400; ++round) {
    Clause g = gen.clause(3, 2, 3);
    g.set_id(100);
    std::vector<Clause> p;
    for (int k = 0; k < 4; ++k) {
      p.push_back(gen.clause(3, 2, 3));
      p.back().set_id(k);
    }
    auto got = generate(g, p);
    auto want = expected_inferences(g, p);
    ASSERT_EQ(got.size(), want.size()) << "round " << round;
    for (std::size_t k = 0; k < got.size(); ++k) ASSERT_TRUE(got[k].same_literals(want[k])) << "round " << round;
    total += got.size();
  }
  EXPECT_GT(total, 200u);
}

TEST(Generate, OriginsPointAtParents) {
  SymbolTable t;
  Clause g = clause_of("p(X) | p(a) | ~q(X)", t);
  g.set_id(7);
  Clause d = clause_of("q(b) | r", t);
  d.set_id(3);
  auto out = generate(g, std::vector<Clause>{d});
  ASSERT_FALSE(out.empty());
  const Origin& o = out[0].origin();
  EXPECT_EQ(o.rule, InferenceRule::Resolution);
  EXPECT_EQ(o.parents, (std::vector<ClauseId>{7, 3}));
  EXPECT_EQ(o.positions, (std::vector<int>{2, 0}));
  const Origin& f = out.back().origin();
  EXPECT_EQ(f.rule, InferenceRule::Factoring);
  EXPECT_EQ(f.parents, (std::vector<ClauseId>{7}));
  // p(X) | p(a) factors to p(a) | ~q(a).
  EXPECT_TRUE(out.back().same_literals(clause_of("p(a) | ~q(a)", t)));
}

TEST(Generate, DropsTautologies) {
  SymbolTable t;
  Clause g = clause_of("p(X) | ~q(X)", t);
  Clause d = clause_of("q(Y) | ~p(Y)", t);
  // Both resolvents are tautologies.
  EXPECT_TRUE(generate(g, std::vector<Clause>{d}).empty());
}

TEST(Limits, ParseAndPrint) {
  auto l = Limits::parse("T60-G10000");
  EXPECT_EQ(l.time_limit_s, 60);
  EXPECT_EQ(l.generated_limit, 10000);
  EXPECT_EQ(l.str(), "T60-G10000");
  EXPECT_THROW(Limits::parse("G10-T5"), ConfigError);
  EXPECT_THROW(Limits::parse("T0-G5"), ConfigError);
  EXPECT_THROW(Limits::parse("T5-Gx"), ConfigError);
}

TEST(Search, ChainProof) {
  Problem p = parse_problem(kChain, "chain");
  auto r = given_clause_loop(p, SearchConfig{});
  ASSERT_EQ(r.verdict, Verdict::Proof);
  EXPECT_EQ(exit_code(r.verdict), 0);
  ASSERT_FALSE(r.proof.empty());
  EXPECT_TRUE(r.proof.back().empty());
  // The proof is closed under parents.
  std::set<ClauseId> ids;
  for (const auto& c : r.proof) ids.insert(c.id());
  for (const auto& c : r.proof)
    for (auto parent : c.origin().parents) EXPECT_TRUE(ids.count(parent)) << parent;
  // Positive trace steps are exactly the proof clauses that were selected.
  std::size_t pos = 0;
  for (const auto& s : r.trace) {
    pos += s.positive;
    EXPECT_EQ(s.positive, ids.count(s.given) == 1);
  }
  // h, r, g, ~p(f(a)), ~p(a); the empty clause is never selected.
  EXPECT_EQ(pos, 5u);
  EXPECT_EQ(proof_watchlist(r).size(), r.proof.size() - 1);
}

TEST(Search, Saturates) {
  Problem p = parse_problem("cnf(a, axiom, (p(a))).\ncnf(b, negated_conjecture, (q(b))).\n", "sat");
  auto r = given_clause_loop(p, SearchConfig{});
  EXPECT_EQ(r.verdict, Verdict::Saturated);
  EXPECT_EQ(exit_code(r.verdict), 1);
  EXPECT_EQ(r.stats.processed, 2);
}

TEST(Search, PigeonholeRunsOutOfResources) {
  Problem p = parse_problem(pigeonhole(6), "php6");
  SearchConfig cfg;
  cfg.limits.generated_limit = 100;
  auto r = given_clause_loop(p, cfg);
  EXPECT_EQ(r.verdict, Verdict::ResourceOut);
  EXPECT_EQ(exit_code(r.verdict), 2);
  EXPECT_GE(r.stats.generated, 100);
}

TEST(Search, SmallPigeonholeIsRefuted) {
  Problem p = parse_problem(pigeonhole(2), "php2");
  auto r = given_clause_loop(p, SearchConfig{});
  EXPECT_EQ(r.verdict, Verdict::Proof);
}

TEST(Search, ForwardSubsumptionPrunes) {
  Problem p = parse_problem(
      "cnf(a, axiom, (p(X))).\ncnf(b, axiom, (p(a) | q(b))).\ncnf(c, axiom, (~r | s)).\n", "fs");
  SearchConfig on;
  auto r1 = given_clause_loop(p, on);
  SearchConfig off;
  off.forward_subsumption = false;
  auto r2 = given_clause_loop(p, off);
  EXPECT_EQ(r1.stats.forward_subsumed, 1);
  EXPECT_EQ(r2.stats.forward_subsumed, 0);
  EXPECT_EQ(r1.stats.processed + 1, r2.stats.processed);
}

TEST(Search, RepeatableTraces) {
  Problem p1 = parse_problem(pigeonhole(3), "php3");
  Problem p2 = parse_problem(pigeonhole(3), "php3");
  auto a = given_clause_loop(p1, SearchConfig{});
  auto b = given_clause_loop(p2, SearchConfig{});
  EXPECT_EQ(format_trace("php3", a), format_trace("php3", b));
  EXPECT_EQ(format_given(a, *p1.symbols), format_given(b, *p2.symbols));
}

TEST(Trace, RoundTrip) {
  Problem p = parse_problem(kChain, "chain");
  auto r = given_clause_loop(p, SearchConfig{});
  std::string text = format_trace("chain", r);
  Trace t = parse_trace(text);
  EXPECT_EQ(t.problem, "chain");
  ASSERT_EQ(t.steps.size(), r.trace.size());
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    EXPECT_EQ(t.steps[i].given, r.trace[i].given);
    EXPECT_EQ(t.steps[i].positive, r.trace[i].positive);
  }
  EXPECT_THROW(parse_trace("3 pos\n"), std::runtime_error);
  EXPECT_THROW(parse_trace("# watchlists 1 4\n3 pos\n"), std::runtime_error);
  EXPECT_THROW(parse_trace("# watchlists 2 4\n"), std::runtime_error);
}

TEST(Trace, GivenFileParsesBack) {
  Problem p = parse_problem(kChain, "chain");
  auto r = given_clause_loop(p, SearchConfig{});
  SymbolTable copy = *p.symbols;
  auto back = parse_clauses(format_given(r, *p.symbols), copy);
  ASSERT_EQ(back.size(), r.given.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].name, "g" + std::to_string(r.given[i].id()));
    EXPECT_TRUE(back[i].clause.same_literals(r.given[i]));
  }
}
