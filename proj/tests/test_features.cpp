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

#include "hintgrind/features.hpp"
#include "support.hpp"

using namespace hintgrind;
using testing_support::clause_of;

// Published FNV-1a 64-bit test vectors.
TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(fnv1a_update(fnv1a("foo"), "bar"), fnv1a("foobar"));
  EXPECT_EQ(hash_feature("a", 256), 0x8cu);
}

TEST(Walks, SmallClause) {
  SymbolTable t;
  Clause c = clause_of("p(f(X), a) | ~q", t);
  FeatureBag want{{"+p/f/VAR", 1}, {"+p/a/END", 1}, {"f/VAR/END", 1}, {"-q/END/END", 1},
                  {"#lits", 2},    {"#pos", 1},     {"#syms", 4},     {"#depth", 3}};
  EXPECT_EQ(extract_walks(c, t), want);
}

TEST(Walks, RepeatedWalksAccumulate) {
  SymbolTable t;
  Clause c = clause_of("r(g(a, a), skolem_1)", t);
  auto bag = extract_walks(c, t);
  EXPECT_EQ(bag["+r/g/a"], 2.0);
  EXPECT_EQ(bag["+r/SKO/END"], 1.0);
  EXPECT_EQ(bag["g/a/END"], 2.0);
}

TEST(Walks, RenamingInvariant) {
  SymbolTable t;
  EXPECT_EQ(extract_walks(clause_of("p(X, f(Y))", t), t), extract_walks(clause_of("p(Z, f(U))", t), t));
}

// The fused hashing path must equal hashing the string bag.
TEST(Hashing, FusedPathMatchesStringBag) {
  SymbolTable t;
  auto sig = testing_support::Signature::make(t, 3, 2, 3);
  testing_support::ClauseGen gen(sig, 4);
  for (std::uint32_t base : {256u, 1024u, 1u << 15}) {
    for (int i = 0; i < 500; ++i) {
      Clause c = gen.clause(4, 3, 3);
      std::vector<std::pair<std::uint32_t, double>> fused, oracle;
      hash_clause_into(c, t, base, fused);
      detail::compact(fused);
      std::map<std::uint32_t, double> sums;
      for (const auto& [f, v] : extract_walks(c, t)) sums[static_cast<std::uint32_t>(fnv1a(f) % base)] += v;
      for (const auto& [k, v] : sums)
        if (v != 0) oracle.emplace_back(k, v);
      ASSERT_EQ(fused, oracle);
    }
  }
}

TEST(Vector, BlocksAndProofState) {
  Problem p = parse_problem("cnf(g, negated_conjecture, (~q(b))).\ncnf(a, axiom, (p(a))).\n", "x", nullptr);
  FeatureConfig cfg{256, 3};
  ASSERT_EQ(cfg.dim(), 515u);
  auto conj = ConjectureBlock::of(conjecture_features(p), cfg.hash_base);
  std::vector<double> psv{0.5, 0.0, 1.0};
  auto v = build_vector(p.clauses[1].clause, *p.symbols, conj, psv, cfg);
  EXPECT_EQ(v.dim, 515u);
  for (std::size_t i = 1; i < v.entries.size(); ++i) EXPECT_LT(v.entries[i - 1].first, v.entries[i].first);
  EXPECT_EQ(v.get(512), 0.5);
  EXPECT_EQ(v.get(513), 0.0);
  EXPECT_EQ(v.get(514), 1.0);
  EXPECT_EQ(v.get(256 + hash_feature("-q/b/END", 256)), 1.0);
  EXPECT_EQ(v.get(hash_feature("+p/a/END", 256)), 1.0);
  // Same thing through the bag overload.
  auto w = build_vector(p.clauses[1].clause, *p.symbols, conjecture_features(p), psv, cfg);
  EXPECT_EQ(v.entries, w.entries);
  std::vector<double> zeros(3, 0.0);
  auto z = build_vector(p.clauses[1].clause, *p.symbols, conj, zeros, cfg);
  for (const auto& e : z.entries) EXPECT_LT(e.first, 512u);
  std::vector<double> bad(2, 0.0);
  EXPECT_THROW(build_vector(p.clauses[1].clause, *p.symbols, conj, bad, cfg), ConfigError);
}

TEST(Config, HashBaseMustBePowerOfTwo) {
  EXPECT_NO_THROW((FeatureConfig{256, 0}.validate()));
  EXPECT_THROW((FeatureConfig{300, 0}.validate()), ConfigError);
  EXPECT_THROW((FeatureConfig{128, 0}.validate()), ConfigError);
}

TEST(ExampleFormat, RoundTrip) {
  SparseVector v;
  v.dim = 600;
  v.entries = {{3, 1.0}, {40, 2.5}, {599, 0.125}};
  std::string line = format_example(1, v);
  EXPECT_EQ(line, "1 3:1 40:2.5 599:0.125");
  auto back = parse_example(line, 600);
  EXPECT_EQ(back.label, 1);
  EXPECT_EQ(back.vector.entries, v.entries);
  EXPECT_THROW(parse_example("2 1:1"), std::runtime_error);
  EXPECT_THROW(parse_example("0 5:1 3:1"), std::runtime_error);
  EXPECT_THROW(parse_example("0 700:1", 600), std::runtime_error);
  EXPECT_THROW(parse_example("0 7"), std::runtime_error);
}
