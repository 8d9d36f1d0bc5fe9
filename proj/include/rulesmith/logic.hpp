#pragma once

// Terms, atoms, clauses, programs, bias declarations and example sets for
// function-free definite-clause programs.

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rulesmith {

/// Raised when a value would violate one of the type invariants below.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the text readers; carries the 1-based line of the fault.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

bool is_constant_name(std::string_view name);
bool is_variable_name(std::string_view name);
bool is_predicate_name(std::string_view name);

class Term {
 public:
  enum class Kind : unsigned char { variable, constant };

  static Term constant(std::string name);
  static Term variable(std::string name);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool is_variable() const noexcept { return kind_ == Kind::variable; }
  bool is_constant() const noexcept { return kind_ == Kind::constant; }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term&, const Term&) = default;

 private:
  Term(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const noexcept { return args.size(); }
  bool is_ground() const noexcept;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom&, const Atom&) = default;
};

/// Builds a ground atom from constant names; throws InvariantError on a bad name.
Atom make_atom(std::string predicate, std::initializer_list<std::string_view> constants);

/// A definite clause `head :- body`. An empty body makes it a fact.
struct Clause {
  Atom head;
  std::vector<Atom> body;

  bool is_fact() const noexcept { return body.empty(); }

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Distinct variable names in order of first occurrence (head, then body).
std::vector<std::string> clause_variables(const Clause& c);

/// Every head variable occurs somewhere in the body.
bool is_range_restricted(const Clause& c);

/// Head plus body literals form one component under shared variables.
/// Literals without variables impose no binding and are ignored.
bool is_connected(const Clause& c);

/// Throws InvariantError unless `c` is a ground fact or a range-restricted,
/// connected rule.
void check_clause(const Clause& c);

/// Canonical representative of the renaming/body-order class of `c`:
/// variables are V0, V1, ... by first occurrence and the body is the
/// lexicographically least literal sequence over all body orderings.
Clause canonical(const Clause& c);

/// Total order on canonical clauses: head, then body literal sequence.
/// Variables sort before constants, variables by index, constants by name.
std::strong_ordering compare_canonical(const Clause& a, const Clause& b);

/// Ordered, duplicate-free clause set. Duplicates are detected modulo
/// variable renaming and body reordering.
class Program {
 public:
  Program() = default;

  /// Adds `c`; returns false when an equivalent clause is already present.
  bool add(Clause c);
  bool contains(const Clause& c) const;
  /// Removes the clause equivalent to `c`; returns false if absent.
  bool remove(const Clause& c);

  const std::vector<Clause>& clauses() const noexcept { return clauses_; }
  std::size_t size() const noexcept { return clauses_.size(); }
  bool empty() const noexcept { return clauses_.empty(); }
  auto begin() const noexcept { return clauses_.begin(); }
  auto end() const noexcept { return clauses_.end(); }

  /// Clauses of `a` followed by those of `b` not already in `a`.
  static Program unite(const Program& a, const Program& b);

  /// Equal as sets (order-insensitive).
  friend bool operator==(const Program& a, const Program& b) { return a.keys_ == b.keys_; }

 private:
  std::vector<Clause> clauses_;
  std::set<std::string> keys_;
};

Program program_of(std::initializer_list<Clause> clauses);

struct PredicateDecl {
  std::string name;
  std::size_t arity = 0;
  /// One type per argument, or empty when the predicate is untyped.
  std::vector<std::string> arg_types;

  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

/// Hypothesis-space declaration.
struct BiasSpec {
  static constexpr std::size_t kDefaultMaxVars = 6;
  static constexpr std::size_t kDefaultMaxBody = 4;
  static constexpr std::size_t kDefaultMaxClauses = 20;

  std::vector<PredicateDecl> head_decls;
  std::vector<PredicateDecl> body_decls;
  std::size_t max_vars = kDefaultMaxVars;
  std::size_t max_body = kDefaultMaxBody;
  std::size_t max_clauses = kDefaultMaxClauses;

  const PredicateDecl* find_head(std::string_view name) const;
  const PredicateDecl* find_body(std::string_view name) const;
  /// Head declaration first, then body.
  const PredicateDecl* find(std::string_view name) const;
  bool declares(std::string_view name, std::size_t arity) const;
  bool is_head(std::string_view name, std::size_t arity) const;
  std::set<std::string> types() const;

  /// Throws InvariantError on duplicate declarations or nonpositive bounds.
  void check() const;

  friend bool operator==(const BiasSpec&, const BiasSpec&) = default;
};

/// Positive and negative ground examples, kept in insertion order.
class ExampleSet {
 public:
  /// Adds a positive; false if already present. Throws InvariantError when
  /// the atom is non-ground or already a negative.
  bool add_positive(Atom a);
  bool add_negative(Atom a);
  bool remove(const Atom& a);

  const std::vector<Atom>& positives() const noexcept { return positives_; }
  const std::vector<Atom>& negatives() const noexcept { return negatives_; }
  bool has_positive(const Atom& a) const { return pos_set_.contains(a); }
  bool has_negative(const Atom& a) const { return neg_set_.contains(a); }
  bool empty() const noexcept { return positives_.empty() && negatives_.empty(); }
  std::size_t size() const noexcept { return positives_.size() + negatives_.size(); }

  /// Union of `a` and `b`, or nullopt when some atom would carry both labels.
  static std::optional<ExampleSet> try_unite(const ExampleSet& a, const ExampleSet& b);

  friend bool operator==(const ExampleSet& a, const ExampleSet& b) {
    return a.pos_set_ == b.pos_set_ && a.neg_set_ == b.neg_set_;
  }

 private:
  std::vector<Atom> positives_;
  std::vector<Atom> negatives_;
  std::set<Atom> pos_set_;
  std::set<Atom> neg_set_;
};

}  // namespace rulesmith
