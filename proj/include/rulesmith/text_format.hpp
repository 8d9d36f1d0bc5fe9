#pragma once

// Readers and writers for the bundle files:
//   *.bk     ground facts, one `pred(c1,...,ck).` per line
//   *.bias   head_pred/body_pred/type/max_* directives
//   *.exs    `pos(atom).` / `neg(atom).`
//   *.rules  definite clauses
// `%` starts a comment that runs to end of line.

#include <string>
#include <string_view>

#include "rulesmith/logic.hpp"

namespace rulesmith {

/// Ground facts. Throws ParseError (with line) on malformed or non-ground input.
Program parse_facts(std::string_view text);

/// `pos(...)`/`neg(...)` wrapped ground atoms. With a bias in force, every
/// example predicate must be a declared head predicate of matching arity.
ExampleSet parse_examples(std::string_view text, const BiasSpec* bias = nullptr);

/// Bias directives; omitted bounds keep the BiasSpec defaults.
BiasSpec parse_bias(std::string_view text);

/// A single clause; rules must be range-restricted and connected.
Clause parse_clause(std::string_view text);

/// A sequence of clauses (facts or rules).
Program parse_rules(std::string_view text);

std::string print_term(const Term& t);
std::string print_atom(const Atom& a);
/// Canonical text: `head:- b1,...,bn.` or `fact.`
std::string print_clause(const Clause& c);
/// One canonical clause per line, in program order.
std::string print_program(const Program& p);
std::string print_examples(const ExampleSet& e);
std::string print_bias(const BiasSpec& b);

}  // namespace rulesmith
