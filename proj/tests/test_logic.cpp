#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles/random_programs.hpp"
#include "oracles/renaming_oracle.hpp"
#include "rulesmith/logic.hpp"
#include "rulesmith/text_format.hpp"

using namespace rulesmith;

namespace {

Term C(const char* n) { return Term::constant(n); }
Term V(const char* n) { return Term::variable(n); }

Clause rule2() { return parse_clause("collision(V0,V1):- landing_runway(V1,V2),cross_runway(V0,V2)."); }

}  // namespace

TEST(Term, NameClasses) {
  EXPECT_TRUE(is_constant_name("r31l"));
  EXPECT_TRUE(is_constant_name("42"));
  EXPECT_FALSE(is_constant_name("A1"));
  EXPECT_TRUE(is_variable_name("Agent_2"));
  EXPECT_FALSE(is_variable_name("agent"));
  EXPECT_THROW(Term::constant("Abc"), InvariantError);
  EXPECT_THROW(Term::variable("abc"), InvariantError);
  EXPECT_EQ(C("a1"), C("a1"));
  EXPECT_NE(C("a1"), Term::variable("A1"));
}

TEST(Atom, Groundness) {
  EXPECT_TRUE(make_atom("landing_runway", {"a1", "r1"}).is_ground());
  Atom a{"collision", {C("a1"), V("X")}};
  EXPECT_FALSE(a.is_ground());
  EXPECT_EQ(a.arity(), 2u);
}

TEST(Clause, RangeRestrictionAndConnectedness) {
  Clause unbound{{"collision", {V("V0"), V("V1")}}, {{"on_taxiway", {V("V2")}}}};
  EXPECT_FALSE(is_range_restricted(unbound));
  EXPECT_THROW(check_clause(unbound), InvariantError);

  Clause linked_by_head{{"collision", {V("V0"), V("V1")}},
                        {{"on_taxiway", {V("V0")}}, {"on_taxiway", {V("V1")}}}};
  EXPECT_TRUE(is_connected(linked_by_head));
  Clause disconnected{{"collision", {V("V0"), V("V1")}},
                      {{"cross_runway", {V("V0"), V("V1")}}, {"same_runway", {V("V2"), V("V3")}}}};
  EXPECT_TRUE(is_range_restricted(disconnected));
  EXPECT_FALSE(is_connected(disconnected));
  EXPECT_THROW(check_clause(disconnected), InvariantError);

  EXPECT_NO_THROW(check_clause(rule2()));
  EXPECT_THROW(check_clause(Clause{{"collision", {V("A"), C("b")}}, {}}), InvariantError);
}

TEST(Canonical, RenamesByFirstOccurrence) {
  const Clause c = parse_clause("collision(A,B):- cross_runway(A,R),landing_runway(B,R).");
  EXPECT_EQ(print_clause(c), "collision(V0,V1):- cross_runway(V0,V2),landing_runway(V1,V2).");
}

TEST(Canonical, BodyOrderAndNamesIrrelevant) {
  const Clause a = parse_clause("collision(X,Y):- landing_runway(Y,R),cross_runway(X,R).");
  const Clause b = parse_clause("collision(P,Q):- cross_runway(P,S),landing_runway(Q,S).");
  EXPECT_EQ(canonical(a), canonical(b));
  EXPECT_EQ(canonical(canonical(a)), canonical(a));
}

TEST(Canonical, DistinguishesVariableSharing) {
  const Clause a = parse_clause("collision(X,Y):- landing_runway(Y,R),cross_runway(X,R).");
  const Clause b = parse_clause("collision(X,Y):- landing_runway(Y,R),cross_runway(X,S),same_runway(R,S).");
  const Clause c = parse_clause("collision(X,Y):- landing_runway(X,R),cross_runway(Y,R).");
  EXPECT_NE(canonical(a), canonical(b));
  EXPECT_NE(canonical(a), canonical(c));
}

namespace {

Clause random_variant(const Clause& c, std::mt19937_64& rng) {
  auto vars = clause_variables(c);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < vars.size(); ++i) names.push_back("Z" + std::to_string(i));
  std::shuffle(names.begin(), names.end(), rng);
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = names[i];
  Clause out{oracle::rename_atom(c.head, m), {}};
  for (const auto& a : c.body) out.body.push_back(oracle::rename_atom(a, m));
  std::shuffle(out.body.begin(), out.body.end(), rng);
  return out;
}

bool has_duplicate_literal(const Clause& c) {
  auto b = c.body;
  std::sort(b.begin(), b.end());
  return std::adjacent_find(b.begin(), b.end()) != b.end();
}

}  // namespace

TEST(Canonical, MatchesBruteForceRenamingOracle) {
  oracle::RandomShape shape;
  shape.predicates = 2;
  shape.constants = 2;
  shape.vars = 4;
  shape.max_body = 3;
  oracle::ProgramGen gen(7, shape);
  int equal_pairs = 0;
  for (int i = 0; i < 3000; ++i) {
    const Clause a = gen.rule();
    if (has_duplicate_literal(a)) continue;
    Clause b = gen.chance(0.5) ? random_variant(a, gen.rng()) : gen.rule();
    if (has_duplicate_literal(b)) continue;
    const bool same = canonical(a) == canonical(b);
    equal_pairs += same;
    ASSERT_EQ(same, oracle::variant_by_bruteforce(a, b)) << print_atom(a.head) << " vs " << print_atom(b.head);
  }
  EXPECT_GT(equal_pairs, 500);
}

TEST(Canonical, IdempotentAndRoundTrips) {
  oracle::RandomShape shape;
  shape.max_body = 4;
  oracle::ProgramGen gen(11, shape);
  for (int i = 0; i < 2000; ++i) {
    const Clause c = gen.rule();
    const Clause k = canonical(c);
    ASSERT_EQ(canonical(k), k);
    if (is_connected(c)) {
      ASSERT_EQ(parse_clause(print_clause(c)), k);
    }
  }
}

TEST(CompareCanonical, TotalOrder) {
  const Clause a = parse_clause("collision(V0,V1):- cross_runway(V0,V2),landing_runway(V1,V2).");
  const Clause b = parse_clause("collision(V0,V1):- landing_runway(V1,V2),same_runway(V3,V2),holding_on_runway(V0,V3).");
  EXPECT_EQ(compare_canonical(a, a), std::strong_ordering::equal);
  EXPECT_EQ(compare_canonical(a, b), std::strong_ordering::less);
  EXPECT_EQ(compare_canonical(b, a), std::strong_ordering::greater);
}

TEST(Program, DeduplicatesModuloRenaming) {
  Program p;
  EXPECT_TRUE(p.add(rule2()));
  EXPECT_FALSE(p.add(parse_clause("collision(A,B):- cross_runway(A,R),landing_runway(B,R).")));
  EXPECT_EQ(p.size(), 1u);
  EXPECT_TRUE(p.contains(parse_clause("collision(P,Q):- cross_runway(P,X),landing_runway(Q,X).")));
  EXPECT_TRUE(p.remove(rule2()));
  EXPECT_TRUE(p.empty());
}

TEST(Program, SetEqualityIgnoresOrder) {
  const Clause f1{make_atom("on_taxiway", {"a1"}), {}};
  const Clause f2{make_atom("on_taxiway", {"a2"}), {}};
  EXPECT_EQ(program_of({f1, f2}), program_of({f2, f1}));
  EXPECT_EQ(Program::unite(program_of({f1}), program_of({f2, f1})).size(), 2u);
}

TEST(ExampleSet, Disjointness) {
  ExampleSet e;
  EXPECT_TRUE(e.add_positive(make_atom("collision", {"a1", "a2"})));
  EXPECT_FALSE(e.add_positive(make_atom("collision", {"a1", "a2"})));
  EXPECT_THROW(e.add_negative(make_atom("collision", {"a1", "a2"})), InvariantError);
  EXPECT_THROW(e.add_positive(Atom{"collision", {V("X"), C("a")}}), InvariantError);

  ExampleSet other;
  other.add_negative(make_atom("collision", {"a1", "a2"}));
  EXPECT_FALSE(ExampleSet::try_unite(e, other).has_value());
  ExampleSet third;
  third.add_negative(make_atom("collision", {"a2", "a1"}));
  auto u = ExampleSet::try_unite(e, third);
  ASSERT_TRUE(u.has_value());
  EXPECT_EQ(u->size(), 2u);
}

TEST(BiasSpec, CheckRejectsDuplicates) {
  BiasSpec b;
  b.head_decls.push_back({"collision", 2, {}});
  b.head_decls.push_back({"collision", 2, {}});
  EXPECT_THROW(b.check(), InvariantError);
}
