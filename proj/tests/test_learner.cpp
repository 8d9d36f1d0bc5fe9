#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "clause_search.hpp"
#include "rulesmith/entailment.hpp"
#include "rulesmith/learner.hpp"
#include "rulesmith/text_format.hpp"

using namespace rulesmith;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BiasSpec vocabulary() { return parse_bias(slurp(std::string(RULESMITH_DATA_DIR) + "/bias/vocabulary.bias")); }

std::set<std::string> printed(const std::vector<Clause>& cs) {
  std::set<std::string> out;
  for (const auto& c : cs) out.insert(print_clause(c));
  return out;
}

// Every clause over V0..V{max_vars-1} built literal by literal, filtered by
// the stream's admission rules and deduplicated by canonical text.
std::set<std::string> brute_force_stream(const BiasSpec& bias) {
  std::set<std::string> out;
  for (const auto& h : bias.head_decls) {
    Clause c;
    c.head.predicate = h.name;
    for (std::size_t i = 0; i < h.arity; ++i) c.head.args.push_back(Term::variable("V" + std::to_string(i)));
    std::vector<Atom> lits;
    for (const auto& d : bias.body_decls) {
      if (bias.is_head(d.name, d.arity)) continue;
      std::vector<std::size_t> idx(d.arity, 0);
      while (true) {
        Atom a{d.name, {}};
        for (auto v : idx) a.args.push_back(Term::variable("V" + std::to_string(v)));
        lits.push_back(a);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == bias.max_vars) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    std::function<void(std::size_t)> grow = [&](std::size_t from) {
      if (!c.body.empty() && is_range_restricted(c) && is_connected(c)) {
        std::map<std::string, std::string> types;
        bool typed = true;
        auto note = [&](const PredicateDecl* d, const Atom& a) {
          if (!d || d->arg_types.empty()) return;
          for (std::size_t i = 0; i < a.arity(); ++i) {
            auto [it, fresh] = types.emplace(a.args[i].name(), d->arg_types[i]);
            if (!fresh && it->second != d->arg_types[i]) typed = false;
          }
        };
        note(bias.find_head(c.head.predicate), c.head);
        for (const auto& b : c.body) note(bias.find_body(b.predicate), b);
        if (typed) out.insert(print_clause(c));
      }
      if (c.body.size() == bias.max_body) return;
      for (std::size_t i = from; i < lits.size(); ++i) {
        c.body.push_back(lits[i]);
        grow(i + 1);
        c.body.pop_back();
      }
    };
    grow(0);
  }
  return out;
}

Program rule2() { return parse_rules("collision(V0,V1):- landing_runway(V1,V2),cross_runway(V0,V2)."); }

}  // namespace

TEST(Enumerate, SingleLiteralCannotBindBothAgents) {
  const BiasSpec b = parse_bias(
      "head_pred(collision,2).\nbody_pred(cross_runway,2).\ntype(collision,(agent,agent)).\n"
      "type(cross_runway,(agent,runway)).\nmax_body(1).\nmax_vars(3).");
  EXPECT_TRUE(enumerate_clauses(b).empty());
}

TEST(Enumerate, ContainsRuleTwo) {
  BiasSpec b = vocabulary();
  b.max_body = 2;
  b.max_vars = 3;
  const auto stream = enumerate_clauses(b);
  EXPECT_TRUE(printed(stream).contains(print_clause(rule2().clauses()[0])));
}

TEST(Enumerate, OrderedDuplicateFreeAndAdmissible) {
  BiasSpec b = vocabulary();
  b.max_body = 2;
  b.max_vars = 4;
  const auto stream = enumerate_clauses(b);
  ASSERT_FALSE(stream.empty());
  EXPECT_EQ(printed(stream).size(), stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Clause& c = stream[i];
    EXPECT_EQ(canonical(c), c);
    EXPECT_TRUE(is_range_restricted(c) && is_connected(c));
    EXPECT_LE(c.body.size(), b.max_body);
    EXPECT_LE(clause_variables(c).size(), b.max_vars);
    if (i > 0) {
      const Clause& p = stream[i - 1];
      const bool ordered = p.body.size() < c.body.size() ||
                           (p.body.size() == c.body.size() && compare_canonical(p, c) < 0);
      ASSERT_TRUE(ordered) << print_clause(p) << " then " << print_clause(c);
    }
  }
}

TEST(Enumerate, MatchesBruteForce) {
  const BiasSpec typed = parse_bias(
      "head_pred(t,2).\nbody_pred(p,2).\nbody_pred(q,2).\nbody_pred(r,1).\n"
      "type(t,(a,a)).\ntype(p,(a,b)).\ntype(q,(b,b)).\ntype(r,(a,)).\nmax_body(3).\nmax_vars(4).");
  EXPECT_EQ(printed(enumerate_clauses(typed)), brute_force_stream(typed));

  const BiasSpec untyped = parse_bias(
      "head_pred(t,2).\nhead_pred(s,1).\nbody_pred(p,2).\nbody_pred(r,1).\nbody_pred(s,1).\nmax_body(2).\nmax_vars(3).");
  const auto stream = printed(enumerate_clauses(untyped));
  EXPECT_EQ(stream, brute_force_stream(untyped));
  for (const auto& s : stream) EXPECT_EQ(s.find(":- s("), std::string::npos) << s;
}

TEST(Solve, RuleTwoScenario) {
  SolverRequest req;
  req.bias = vocabulary();
  req.background = parse_facts(
      "landing_runway(b1,r1).\ncross_runway(a1,r1).\n"
      "landing_runway(b2,r2).\ncross_runway(a2,r2).\n"
      "landing_runway(b3,r3).\ncross_runway(a3,r4).\nholding_short_runway(a4,r3).\n");
  req.examples = parse_examples(
      "pos(collision(a1,b1)).\npos(collision(a2,b2)).\n"
      "neg(collision(b1,a1)).\nneg(collision(a3,b3)).\nneg(collision(a4,b3)).\n");
  for (auto mode : {SearchMode::pruned, SearchMode::exhaustive}) {
    const SolverResult r = solve(req, {mode, false});
    ASSERT_EQ(r.outcome, SolveOutcome::hypothesis);
    EXPECT_EQ(r.hypothesis, rule2());
    EXPECT_TRUE(verify(req.background, r.hypothesis, req.examples).consistent());
  }
}

TEST(Solve, NoPositivesGivesEmptyHypothesis) {
  SolverRequest req;
  req.bias = vocabulary();
  req.examples = parse_examples("neg(collision(a1,a2)).");
  const SolverResult r = solve(req);
  EXPECT_EQ(r.outcome, SolveOutcome::hypothesis);
  EXPECT_TRUE(r.hypothesis.empty());
}

TEST(Solve, IsolatedPositiveHasNoHypothesis) {
  SolverRequest req;
  req.bias = vocabulary();
  req.background = parse_facts("landing_runway(b1,r1).\ncross_runway(a1,r1).");
  ExampleSet e;
  e.add_positive(make_atom("collision", {"z1", "z2"}));
  for (const char* x : {"a1", "b1", "z1", "z2"}) {
    for (const char* y : {"a1", "b1", "z1", "z2"}) {
      if (std::string(x) != "z1" || std::string(y) != "z2") e.add_negative(make_atom("collision", {x, y}));
    }
  }
  req.examples = e;
  for (auto mode : {SearchMode::pruned, SearchMode::exhaustive}) {
    EXPECT_EQ(solve(req, {mode, true}).outcome, SolveOutcome::no_hypothesis);
  }
}

TEST(Solve, NegativeInBackgroundHasNoHypothesis) {
  SolverRequest req;
  req.bias = vocabulary();
  req.background = parse_facts("collision(a1,a2).\nlanding_runway(b1,r1).\ncross_runway(a1,r1).");
  req.examples = parse_examples("pos(collision(a1,b1)).\nneg(collision(a1,a2)).");
  EXPECT_EQ(solve(req).outcome, SolveOutcome::no_hypothesis);
}

TEST(Solve, ZeroTimeoutReportsTimeout) {
  SolverRequest req;
  req.bias = vocabulary();
  req.background = parse_facts("landing_runway(b1,r1).\ncross_runway(a1,r1).");
  req.examples = parse_examples("pos(collision(a1,b1)).");
  req.timeout = std::chrono::milliseconds(0);
  EXPECT_EQ(solve(req).outcome, SolveOutcome::timeout);
  EXPECT_EQ(solve(req, {SearchMode::exhaustive, false}).outcome, SolveOutcome::timeout);
}

TEST(Verify, Statuses) {
  const Program b = parse_facts("landing_runway(a1,r1).\nlanding_runway(a2,r2).");
  ExampleSet e;
  e.add_negative(make_atom("collision", {"a1", "a2"}));
  const Program h = parse_rules("collision(V0,V1):- landing_runway(V0,V2),landing_runway(V1,V3).");
  const Verification v = verify(b, h, e);
  EXPECT_EQ(v.status, Verification::Status::unsound);
  ASSERT_EQ(v.covered_neg.size(), 1u);
  EXPECT_EQ(v.covered_neg[0], make_atom("collision", {"a1", "a2"}));

  ExampleSet p;
  p.add_positive(make_atom("collision", {"a1", "a2"}));
  const Verification w = verify(b, {}, p);
  EXPECT_EQ(w.status, Verification::Status::incomplete);
  EXPECT_EQ(w.missed, p.positives());
}

namespace {

SolverRequest random_request(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  SolverRequest req;
  req.bias = parse_bias(
      "head_pred(t,2).\nbody_pred(p,2).\nbody_pred(q,2).\nbody_pred(r,1).\nmax_body(2).\nmax_vars(3).\nmax_clauses(20).");
  const int nconst = 4 + pick(2);
  auto c = [&] { return "c" + std::to_string(pick(nconst)); };
  const int nfacts = 4 + pick(8);
  for (int i = 0; i < nfacts; ++i) {
    switch (pick(3)) {
      case 0: req.background.add({make_atom("p", {c(), c()}), {}}); break;
      case 1: req.background.add({make_atom("q", {c(), c()}), {}}); break;
      default: req.background.add({make_atom("r", {c()}), {}}); break;
    }
  }
  const int nex = 2 + pick(6);
  for (int i = 0; i < nex; ++i) {
    Atom a = make_atom("t", {c(), c()});
    if (req.examples.has_positive(a) || req.examples.has_negative(a)) continue;
    if (pick(2)) {
      req.examples.add_positive(a);
    } else {
      req.examples.add_negative(a);
    }
  }
  return req;
}

// Exhaustive search for a program of at most three negative-safe clauses
// covering every positive.
bool small_program_exists(const SolverRequest& req) {
  std::vector<std::set<Atom>> covers;
  for (const auto& c : enumerate_clauses(req.bias)) {
    const Coverage cov = coverage(req.background, program_of({c}), req.examples);
    if (cov.covered_neg.empty() && !cov.covered_pos.empty()) {
      covers.emplace_back(cov.covered_pos.begin(), cov.covered_pos.end());
    }
  }
  std::set<Atom> need;
  for (const auto& e : req.examples.positives()) {
    if (!entails(req.background, {}, e)) need.insert(e);
  }
  if (need.empty()) return true;
  auto covers_all = [&](std::initializer_list<std::size_t> idx) {
    return std::all_of(need.begin(), need.end(), [&](const Atom& e) {
      return std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return covers[i].contains(e); });
    });
  };
  const std::size_t n = covers.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (covers_all({i})) return true;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (covers_all({i, j})) return true;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (covers_all({i, j, k})) return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST(Solve, PrunedAndExhaustiveAgree) {
  int found = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const SolverRequest req = random_request(seed);
    const SolverResult a = solve(req, {SearchMode::exhaustive, false});
    const SolverResult b = solve(req, {SearchMode::pruned, true});
    const SolverResult c = solve(req, {SearchMode::pruned, false});
    ASSERT_EQ(a.outcome, b.outcome) << "seed " << seed;
    ASSERT_EQ(print_program(a.hypothesis), print_program(b.hypothesis)) << "seed " << seed;
    ASSERT_EQ(print_program(b.hypothesis), print_program(c.hypothesis)) << "seed " << seed;
    found += a.found();
  }
  EXPECT_GT(found, 30);
}

TEST(Solve, SoundAndCompleteOnSmallInstances) {
  for (std::uint64_t seed = 1000; seed < 1300; ++seed) {
    const SolverRequest req = random_request(seed);
    const SolverResult r = solve(req);
    if (r.found()) {
      ASSERT_TRUE(verify(req.background, r.hypothesis, req.examples).consistent()) << "seed " << seed;
      ASSERT_LE(r.hypothesis.size(), req.bias.max_clauses);
    }
    if (small_program_exists(req)) ASSERT_TRUE(r.found()) << "seed " << seed;
  }
}

TEST(Solve, Deterministic) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SolverRequest req = random_request(seed);
    const SolverResult a = solve(req);
    const SolverResult b = solve(req);
    ASSERT_EQ(a.outcome, b.outcome);
    ASSERT_EQ(print_program(a.hypothesis), print_program(b.hypothesis));
    ASSERT_EQ(a.stats.clauses_enumerated, b.stats.clauses_enumerated);
  }
}

TEST(Solve, ReferenceSolverInterface) {
  const ReferenceSolver s;
  EXPECT_EQ(s.name(), "reference-pruned");
  const SolverRequest req = random_request(3);
  EXPECT_EQ(print_program(s.solve(req).hypothesis), print_program(solve(req).hypothesis));
}

TEST(RefinementGraph, MatchesPlainRefinementUnderAnyFrontier) {
  const detail::SearchBias sb(vocabulary());
  detail::RefinementGraph graph(sb);
  std::mt19937_64 rng(5);
  std::vector<detail::Node> plain = detail::root_nodes(sb);
  std::vector<std::uint32_t> ids = graph.roots();
  for (std::size_t len = 1; len <= sb.max_body; ++len) {
    ASSERT_EQ(plain.size(), ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ASSERT_EQ(graph.node(ids[i]).key(), plain[i].key());
    // Keep a random part of the frontier, as pruning would.
    std::vector<detail::Node> kept;
    std::vector<std::uint32_t> kept_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (rng() % 3 != 0) {
        kept.push_back(plain[i]);
        kept_ids.push_back(ids[i]);
      }
    }
    std::vector<std::size_t> pa, pb;
    plain = detail::next_level(kept, sb, &pa);
    ids = graph.next_level(kept_ids, &pb);
    EXPECT_EQ(pa, pb);
  }
  EXPECT_EQ(detail::refinement_graph(sb), detail::refinement_graph(detail::SearchBias(vocabulary())));
}
