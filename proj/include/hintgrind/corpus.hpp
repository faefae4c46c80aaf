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

// Seeded synthetic CNF problems with shared lemma structure and decoys.
//
// Every problem draws its rules from one global rule set over unary
// predicates p0, p1, ...: one-premise rules ~pi(X) | pj(f(X)) and
// two-premise rules ~pi(X) | ~pk(X) | pj(f(X)), each with a fixed function
// symbol. A problem states a few hypotheses at a fixed ground term, includes a
// random share of the global rules, and asks for a fact that its rules first
// derive at a chosen depth. Proofs of different problems therefore reuse the
// same rules and lemma shapes.
//
// Each problem also carries a decoy: a transitive relation over a chain of
// constants whose closure floods a symbol-count ordering with small clauses
// that never take part in a proof.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "hintgrind/common.hpp"

namespace hintgrind {

struct CorpusParams {
  int problems = 300;
  std::uint64_t seed = 1;
  int predicates = 40;
  int single_rules = 60;     // global one-premise rules
  int double_rules = 120;    // global two-premise rules
  double rule_share = 0.5;   // share of the global rules in each problem
  int hypotheses = 3;
  int start_depth = 3;       // hypotheses hold at e(...e(a)...) of this depth
  int min_depth = 2;         // depth of the goal fact
  int max_depth = 10;
  int min_decoy = 3;         // constants in the decoy relation
  int max_decoy = 14;
};

struct GeneratedProblem {
  std::string name;
  std::string text;
  int depth = 0;  // depth at which the goal fact is first derivable
  int decoy = 0;
};

namespace detail {

struct Rule {
  int premise1 = 0;
  int premise2 = -1;  // -1 for one-premise rules
  int conclusion = 0;
  char fn = 'f';
};

class CorpusBuilder {
 public:
  explicit CorpusBuilder(const CorpusParams& p) : p_(p), rng_(p.seed) {
    auto pred = [&] { return static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(p_.predicates))); };
    const char fns[] = {'f', 'g'};
    for (int i = 0; i < p_.single_rules + p_.double_rules; ++i) {
      Rule r;
      r.premise1 = pred();
      if (i >= p_.single_rules) {
        do r.premise2 = pred();
        while (r.premise2 == r.premise1);
        if (r.premise2 < r.premise1) std::swap(r.premise1, r.premise2);
      }
      r.conclusion = pred();
      r.fn = fns[uniform_below(rng_, 2)];
      rules_.push_back(r);
    }
  }

  GeneratedProblem make(int index) {
    GeneratedProblem gp;
    char buf[32];
    std::snprintf(buf, sizeof buf, "syn_%04d", index);
    gp.name = buf;
    int want = p_.min_depth + static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(p_.max_depth - p_.min_depth + 1)));
    gp.decoy = p_.min_decoy + static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(p_.max_decoy - p_.min_decoy + 1)));

    std::vector<int> hyps;
    while (static_cast<int>(hyps.size()) < std::min(p_.hypotheses, p_.predicates)) {
      int h = static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(p_.predicates)));
      if (std::find(hyps.begin(), hyps.end(), h) == hyps.end()) hyps.push_back(h);
    }
    std::vector<const Rule*> chosen;
    for (const auto& r : rules_)
      if (uniform01(rng_) < p_.rule_share) chosen.push_back(&r);

    // Forward closure level by level; a fact is (predicate, term) and keeps
    // the first level that derives it.
    std::string start = "a";
    for (int i = 0; i < p_.start_depth; ++i) start = "e(" + start + ")";
    std::map<std::pair<int, std::string>, int> level;
    std::vector<std::vector<std::pair<int, std::string>>> layers(1);
    for (int h : hyps) {
      level[{h, start}] = 0;
      layers[0].push_back({h, start});
    }
    constexpr std::size_t kMaxFacts = 4000;
    for (int d = 0; d < want && level.size() < kMaxFacts; ++d) {
      std::vector<std::pair<int, std::string>> next;
      // Facts usable at depth d: everything known with the same term.
      std::map<std::string, std::vector<int>> by_term;
      for (const auto& [f, l] : level) by_term[f.second].push_back(f.first);
      for (const auto& [term, preds] : by_term) {
        auto has = [&](int q) { return std::find(preds.begin(), preds.end(), q) != preds.end(); };
        for (const Rule* r : chosen) {
          if (!has(r->premise1) || (r->premise2 >= 0 && !has(r->premise2))) continue;
          std::pair<int, std::string> fact{r->conclusion, std::string(1, r->fn) + "(" + term + ")"};
          if (level.count(fact)) continue;
          level[fact] = d + 1;
          next.push_back(fact);
        }
      }
      if (next.empty()) break;
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      layers.push_back(std::move(next));
    }
    const auto& last = layers.back();
    const auto& goal = last[uniform_below(rng_, last.size())];
    gp.depth = static_cast<int>(layers.size()) - 1;

    std::vector<std::string> axioms;
    for (int h : hyps)
      axioms.push_back("cnf(hyp_" + std::to_string(h) + ", hypothesis, (p" + std::to_string(h) + "(" + start + "))).");
    for (const Rule* r : chosen) {
      std::string name = "rule_" + std::to_string(r - rules_.data());
      std::string body = "~p" + std::to_string(r->premise1) + "(X)";
      if (r->premise2 >= 0) body += " | ~p" + std::to_string(r->premise2) + "(X)";
      body += " | p" + std::to_string(r->conclusion) + "(" + std::string(1, r->fn) + "(X))";
      axioms.push_back("cnf(" + name + ", axiom, (" + body + ")).");
    }
    for (int i = 0; i + 1 < gp.decoy; ++i)
      axioms.push_back("cnf(link_" + std::to_string(i) + ", axiom, (r(c" + std::to_string(i) + ", c" +
                       std::to_string(i + 1) + "))).");
    if (gp.decoy > 1) {
      axioms.push_back("cnf(trans, axiom, (~r(X, Y) | ~r(Y, Z) | r(X, Z))).");
      axioms.push_back("cnf(mark, axiom, (~s(X) | ~r(X, Y) | s(Y))).");
      axioms.push_back("cnf(mark_0, axiom, (s(c0))).");
    }
    // Shuffle so clause ids carry no hint.
    for (std::size_t i = axioms.size(); i > 1; --i) std::swap(axioms[i - 1], axioms[uniform_below(rng_, i)]);

    std::string& t = gp.text;
    t = "% " + gp.name + ": depth " + std::to_string(gp.depth) + ", decoy " + std::to_string(gp.decoy) + "\n";
    for (const auto& a : axioms) t += a + "\n";
    t += "cnf(goal, negated_conjecture, (~p" + std::to_string(goal.first) + "(" + goal.second + "))).\n";
    return gp;
  }

 private:
  CorpusParams p_;
  Rng rng_;
  std::vector<Rule> rules_;
};

}  // namespace detail

inline std::vector<GeneratedProblem> generate_corpus(const CorpusParams& params) {
  if (params.problems < 1 || params.predicates < 2 || params.min_depth < 1 ||
      params.max_depth < params.min_depth || params.min_decoy < 0 || params.max_decoy < params.min_decoy ||
      params.hypotheses < 1 || params.start_depth < 0 || params.rule_share <= 0.0 || params.rule_share > 1.0)
    throw ConfigError("bad corpus parameters");
  detail::CorpusBuilder b(params);
  std::vector<GeneratedProblem> out;
  for (int i = 0; i < params.problems; ++i) out.push_back(b.make(i));
  return out;
}

// Random watchlists over the corpus signature for index benchmarks: clauses
// of one to three p-literals with random signs and shallow arguments.
struct BenchWatchlistParams {
  int lists = 50;
  int clauses_per_list = 100;
  int predicates = 40;
  std::uint64_t seed = 1;
};

inline std::vector<std::string> generate_bench_watchlists(const BenchWatchlistParams& p) {
  if (p.lists < 1 || p.clauses_per_list < 1 || p.predicates < 1) throw ConfigError("bad watchlist parameters");
  Rng rng(p.seed);
  const char* args[] = {"X", "Y", "f(X)", "g(X)", "f(Y)", "e(X)", "a", "e(a)", "f(e(a))", "g(f(X))"};
  std::vector<std::string> out;
  for (int l = 0; l < p.lists; ++l) {
    std::string text;
    for (int c = 0; c < p.clauses_per_list; ++c) {
      int lits = 1 + static_cast<int>(uniform_below(rng, 3));
      std::string body;
      for (int i = 0; i < lits; ++i) {
        if (i > 0) body += " | ";
        if (uniform_below(rng, 2)) body += "~";
        body += "p" + std::to_string(uniform_below(rng, static_cast<std::uint64_t>(p.predicates)));
        body += "(" + std::string(args[uniform_below(rng, std::size(args))]) + ")";
      }
      text += "cnf(w" + std::to_string(c) + ", plain, (" + body + ")).\n";
    }
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace hintgrind
