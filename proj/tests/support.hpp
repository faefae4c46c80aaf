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

// Shared test helpers: random clause generators and brute-force oracles
// that avoid the library's own matching code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hintgrind/logic.hpp"
#include "hintgrind/tptp.hpp"

namespace testing_support {

using namespace hintgrind;

inline Clause clause_of(std::string_view body, SymbolTable& symbols) {
  auto cs = parse_clauses("cnf(c, axiom, (" + std::string(body) + ")).", symbols);
  return std::move(cs.at(0).clause);
}

// A small signature for generators: predicates and functions with arities.
struct Signature {
  std::vector<std::pair<SymbolId, int>> predicates;
  std::vector<std::pair<SymbolId, int>> functions;  // arity 0 = constant

  static Signature make(SymbolTable& t, int preds, int pred_arity, int fns) {
    Signature s;
    for (int i = 0; i < preds; ++i)
      s.predicates.push_back({t.intern("p" + std::to_string(i), pred_arity, SymbolKind::Predicate), pred_arity});
    s.functions.push_back({t.intern("a", 0, SymbolKind::Function), 0});
    s.functions.push_back({t.intern("b", 0, SymbolKind::Function), 0});
    for (int i = 0; i < fns; ++i)
      s.functions.push_back({t.intern("f" + std::to_string(i), 1 + i % 2, SymbolKind::Function), 1 + i % 2});
    return s;
  }
};

class ClauseGen {
 public:
  ClauseGen(const Signature& sig, std::uint64_t seed) : sig_(sig), rng_(seed) {}

  int below(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_)); }

  Term term(int depth, int vars) {
    if (depth == 0 || below(3) == 0) {
      if (vars > 0 && below(2) == 0) return Term::variable(below(vars));
      std::vector<std::pair<SymbolId, int>> consts;
      for (auto f : sig_.functions)
        if (f.second == 0) consts.push_back(f);
      return Term::app(consts[static_cast<std::size_t>(below(static_cast<int>(consts.size())))].first);
    }
    auto f = sig_.functions[static_cast<std::size_t>(below(static_cast<int>(sig_.functions.size())))];
    std::vector<Term> args;
    for (int i = 0; i < f.second; ++i) args.push_back(term(depth - 1, vars));
    return Term::app(f.first, args);
  }

  Literal literal(int depth, int vars) {
    auto p = sig_.predicates[static_cast<std::size_t>(below(static_cast<int>(sig_.predicates.size())))];
    std::vector<Term> args;
    for (int i = 0; i < p.second; ++i) args.push_back(term(depth, vars));
    return Literal::make(below(2) == 0, p.first, args);
  }

  Clause clause(int max_lits, int depth, int vars) {
    std::vector<Literal> lits;
    int n = 1 + below(max_lits);
    for (int i = 0; i < n; ++i) lits.push_back(literal(depth, vars));
    return Clause(std::move(lits));
  }

  // An instance of `c` under random bindings, with extra literals mixed in.
  Clause instance_plus(const Clause& c, int extra, int depth, int vars) {
    Substitution s;
    for (int v = 0; v < c.num_vars(); ++v) s.bind(v, term(depth, vars));
    std::vector<Literal> lits;
    for (const auto& l : c.literals()) lits.push_back(apply_substitution(l, s));
    for (int i = 0; i < extra; ++i) lits.push_back(literal(depth, vars));
    // Target variables must be disjoint from the pattern's in spirit; the
    // clause constructor renames them anyway.
    std::shuffle(lits.begin(), lits.end(), rng_);
    return Clause(std::move(lits));
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const Signature& sig_;
  std::mt19937_64 rng_;
};

// Every subterm of every literal argument of d, as node vectors.
inline std::vector<std::vector<TermNode>> subterms_of(const Clause& d) {
  std::vector<std::vector<TermNode>> out;
  for (const auto& l : d.literals())
    for (std::size_t pos = 1; pos < l.atom.size(); ++pos)
      out.emplace_back(l.atom.begin() + static_cast<std::ptrdiff_t>(pos),
                       l.atom.begin() + static_cast<std::ptrdiff_t>(pos + l.atom[pos].size));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const TermNode& x, const TermNode& y) {
                                          return x.symbol != y.symbol ? x.symbol < y.symbol : x.size < y.size;
                                        });
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](auto& x, auto& y) {
                                   return x.symbol == y.symbol && x.size == y.size;
                                 });
                        }),
            out.end());
  return out;
}

// Plain substitution of an atom given as nodes; recomputes sizes bottom-up.
inline std::vector<TermNode> substitute(const std::vector<TermNode>& atom,
                                        const std::vector<const std::vector<TermNode>*>& values) {
  // Rebuild recursively from the preorder encoding.
  std::vector<TermNode> out;
  std::size_t i = 0;
  auto rec = [&](auto&& self) -> void {
    const TermNode n = atom[i++];
    if (n.symbol < 0) {
      const auto& v = *values[static_cast<std::size_t>(~n.symbol)];
      out.insert(out.end(), v.begin(), v.end());
      return;
    }
    std::size_t at = out.size();
    out.push_back(TermNode{n.symbol, 1});
    std::size_t end = i - 1 + n.size;
    while (i < end) self(self);
    out[at].size = static_cast<std::uint32_t>(out.size() - at);
  };
  rec(rec);
  return out;
}

inline bool same_nodes(const std::vector<TermNode>& a, const std::vector<TermNode>& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](const TermNode& x, const TermNode& y) {
           return x.symbol == y.symbol && x.size == y.size;
         });
}

// Brute force: try every assignment of c's variables to subterms of d (any
// matching substitution only ever binds to those) and test Cσ ⊆ D.
inline bool oracle_subsumes(const Clause& c, const Clause& d) {
  auto universe = subterms_of(d);
  const int nv = c.num_vars();
  if (nv > 0 && universe.empty()) return false;
  std::vector<std::size_t> pick(static_cast<std::size_t>(nv), 0);
  while (true) {
    std::vector<const std::vector<TermNode>*> values;
    for (auto p : pick) values.push_back(&universe[p]);
    bool all = true;
    for (const auto& l : c.literals()) {
      auto inst = substitute(l.atom, values);
      bool found = false;
      for (const auto& m : d.literals())
        if (m.positive == l.positive && same_nodes(inst, m.atom)) found = true;
      if (!found) {
        all = false;
        break;
      }
    }
    if (all) return true;
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == universe.size()) pick[k++] = 0;
    if (k == pick.size()) return false;
  }
}

// Model text read back by hand and evaluated node by node.
struct WalkNode {
  bool leaf = true;
  int feature = 0;
  double threshold = 0, value = 0;
  std::unique_ptr<WalkNode> left, right;
};

inline std::unique_ptr<WalkNode> read_node(std::istringstream& in) {
  auto n = std::make_unique<WalkNode>();
  std::string kind;
  in >> kind;
  if (kind == "leaf") {
    in >> n->value;
  } else {
    n->leaf = false;
    in >> n->feature >> n->threshold;
    n->left = read_node(in);
    n->right = read_node(in);
  }
  return n;
}

struct TreeWalkOracle {
  double base = 0, rate = 0;
  bool ok = false;
  std::vector<std::unique_ptr<WalkNode>> trees;

  explicit TreeWalkOracle(const std::string& text) {
    std::istringstream in(text);
    std::string key;
    std::size_t count = 0;
    while (in >> key) {
      if (key == "base_score") in >> base;
      else if (key == "learning_rate") in >> rate;
      else if (key == "trees") in >> count;
      else if (key == "tree") {
        in >> key;
        trees.push_back(read_node(in));
      }
    }
    ok = trees.size() == count;
  }

  double predict(const std::map<std::uint32_t, double>& x) const {
    double m = base;
    for (const auto& t : trees) {
      const WalkNode* n = t.get();
      while (!n->leaf) {
        auto it = x.find(static_cast<std::uint32_t>(n->feature));
        double v = it == x.end() ? 0.0 : it->second;
        n = v < n->threshold ? n->left.get() : n->right.get();
      }
      m += rate * n->value;
    }
    return 1.0 / (1.0 + std::exp(-m));
  }
};

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hintgrind-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
