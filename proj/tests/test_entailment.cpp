#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles/naive_grounder.hpp"
#include "oracles/random_programs.hpp"
#include "rulesmith/entailment.hpp"
#include "rulesmith/text_format.hpp"

using namespace rulesmith;

namespace {

const char* kRule2 = "collision(V0,V1):- landing_runway(V1,V2),cross_runway(V0,V2).";

std::set<Atom> as_set(const FactStore& s) {
  const auto v = s.atoms();
  return {v.begin(), v.end()};
}

}  // namespace

TEST(Consequences, RuleTwoDerivesCollision) {
  const Program b = parse_facts("landing_runway(a2,r1).\ncross_runway(a1,r1).");
  const Program h = parse_rules(kRule2);
  const FactStore m = consequences(b, h);
  EXPECT_TRUE(m.contains(make_atom("collision", {"a1", "a2"})));
  EXPECT_FALSE(m.contains(make_atom("collision", {"a2", "a1"})));
  EXPECT_EQ(as_set(m), oracle::naive_model(b, h));
  EXPECT_EQ(m.size(), 3u);
}

TEST(Consequences, EmptyCases) {
  const Program b = parse_facts("landing_runway(a2,r1).");
  EXPECT_EQ(as_set(consequences(b, {})), oracle::naive_model(b, {}));
  EXPECT_EQ(consequences(b, {}).size(), 1u);
  EXPECT_EQ(consequences({}, parse_rules(kRule2)).size(), 0u);
}

TEST(Consequences, RecursiveChain) {
  Program b;
  for (int i = 0; i < 6; ++i) {
    b.add({make_atom("edge", {"n" + std::to_string(i), "n" + std::to_string(i + 1)}), {}});
  }
  const Program h = parse_rules("path(X,Y):- edge(X,Y).\npath(X,Z):- edge(X,Y),path(Y,Z).");
  const FactStore m = consequences(b, h);
  EXPECT_TRUE(m.contains(make_atom("path", {"n0", "n6"})));
  EXPECT_EQ(as_set(m), oracle::naive_model(b, h));
}

TEST(Consequences, RejectsNonRangeRestricted) {
  Clause c{{"p", {Term::variable("X")}}, {{"q", {Term::variable("Y")}}}};
  EXPECT_THROW(consequences({}, program_of({c})), InvariantError);
  EXPECT_THROW(FactStore(program_of({parse_clause(kRule2)})), InvariantError);
}

TEST(Consequences, MatchesNaiveOracle) {
  oracle::RandomShape shape;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    oracle::ProgramGen gen(seed, shape);
    const Program b = gen.facts();
    const Program h = gen.rules();
    ASSERT_EQ(as_set(consequences(b, h)), oracle::naive_model(b, h)) << "seed " << seed << "\n"
                                                                    << print_program(b) << print_program(h);
  }
}

TEST(Consequences, JoinOracleAgreesWithGrounder) {
  oracle::RandomShape shape;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    oracle::ProgramGen gen(seed + 4000, shape);
    const Program b = gen.facts();
    const Program h = gen.rules();
    ASSERT_EQ(oracle::join_model(b, h), oracle::naive_model(b, h)) << "seed " << seed;
  }
}

TEST(Consequences, MonotoneInFactsAndRules) {
  oracle::RandomShape shape;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    oracle::ProgramGen gen(seed + 9000, shape);
    const Program b = gen.facts();
    const Program h = gen.rules();
    const auto base = as_set(consequences(b, h));
    Program b2 = b;
    b2.add({gen.fact(), {}});
    Program h2 = h;
    h2.add(gen.rule());
    const auto more = as_set(consequences(b2, h2));
    ASSERT_TRUE(std::includes(more.begin(), more.end(), base.begin(), base.end()));
  }
}

TEST(Consequences, IndependentOfOrder) {
  oracle::RandomShape shape;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    oracle::ProgramGen gen(seed + 500, shape);
    const Program b = gen.facts();
    const Program h = gen.rules();
    auto fb = b.clauses();
    auto fh = h.clauses();
    std::reverse(fb.begin(), fb.end());
    std::reverse(fh.begin(), fh.end());
    Program rb, rh;
    for (auto& c : fb) rb.add(c);
    for (auto& c : fh) rh.add(c);
    ASSERT_EQ(as_set(consequences(b, h)), as_set(consequences(rb, rh)));
  }
}

TEST(Entails, Basics) {
  const Program b = parse_facts("landing_runway(a2,r1).\ncross_runway(a1,r1).");
  const Program h = parse_rules(kRule2);
  EXPECT_TRUE(entails(b, h, make_atom("collision", {"a1", "a2"})));
  EXPECT_TRUE(entails(b, {}, make_atom("cross_runway", {"a1", "r1"})));
  EXPECT_FALSE(entails({}, {}, make_atom("collision", {"a1", "a2"})));
  EXPECT_THROW(entails(b, h, Atom{"collision", {Term::variable("X"), Term::constant("a2")}}), InvariantError);
}

TEST(Coverage, OrderedPairOnly) {
  const Program b = parse_facts("landing_runway(a2,r1).\ncross_runway(a1,r1).");
  ExampleSet e;
  e.add_positive(make_atom("collision", {"a1", "a2"}));
  e.add_negative(make_atom("collision", {"a2", "a1"}));
  const Coverage c = coverage(b, parse_rules(kRule2), e);
  EXPECT_EQ(c.covered_pos.size(), 1u);
  EXPECT_TRUE(c.covered_neg.empty());
  EXPECT_TRUE(coverage(b, {}, e).covered_pos.empty());
  EXPECT_TRUE(coverage(b, parse_rules(kRule2), {}).covered_pos.empty());
}

TEST(Coverage, PositiveInBackgroundIsCovered) {
  const Program b = parse_facts("collision(a1,a2).");
  ExampleSet e;
  e.add_positive(make_atom("collision", {"a1", "a2"}));
  EXPECT_EQ(coverage(b, {}, e).covered_pos.size(), 1u);
}

TEST(RuleSupport, FourIndependentPairs) {
  Program b;
  std::vector<Atom> pos;
  for (int i = 0; i < 4; ++i) {
    const std::string x = "x" + std::to_string(i), y = "y" + std::to_string(i), r = "r" + std::to_string(i);
    b.add({make_atom("landing_runway", {y, r}), {}});
    b.add({make_atom("cross_runway", {x, r}), {}});
    pos.push_back(make_atom("collision", {x, y}));
  }
  pos.push_back(make_atom("collision", {"y0", "x0"}));
  const Clause r = parse_clause(kRule2);
  EXPECT_EQ(rule_support(r, b, pos), 4u);
  EXPECT_EQ(rule_support(parse_clause("collision(V0,V1):- holding_on_runway(V0,V2),landing_runway(V1,V2)."), b, pos), 0u);
}

TEST(RuleSupport, EqualsSingleRuleCoverage) {
  oracle::RandomShape shape;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    oracle::ProgramGen gen(seed + 77, shape);
    const Program b = gen.facts();
    const Clause r = gen.rule();
    ExampleSet e;
    std::vector<Atom> pos;
    for (int i = 0; i < 6; ++i) {
      Atom a = gen.fact();
      if (e.add_positive(a)) pos.push_back(a);
    }
    const auto expected = coverage(b, program_of({r}), e).covered_pos.size();
    ASSERT_EQ(rule_support(r, b, pos), expected) << print_clause(r);

    Program b2 = b;
    b2.add({gen.fact(), {}});
    ASSERT_GE(rule_support(r, b2, pos), expected);
  }
}

TEST(DeriveOnce, UnknownConstantsNeverMatch) {
  const FactStore s(parse_facts("landing_runway(a2,r1).\ncross_runway(a1,r1)."));
  EXPECT_TRUE(derive_once(s, parse_clause("collision(V0,V1):- landing_runway(V1,r9),cross_runway(V0,r9).")).empty());
  EXPECT_EQ(derive_once(s, parse_clause(kRule2)).size(), 1u);
}
