#include "rulesmith/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "canonical_core.hpp"
#include "rulesmith/text_format.hpp"

namespace rulesmith {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line), detail_(message) {}

namespace {

bool is_ident_tail(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

}  // namespace

bool is_constant_name(std::string_view name) {
  if (name.empty()) return false;
  const auto c = static_cast<unsigned char>(name.front());
  if (std::isdigit(c)) {
    return std::all_of(name.begin(), name.end(), [](unsigned char d) { return std::isdigit(d); });
  }
  return std::islower(c) && is_ident_tail(name.substr(1));
}

bool is_variable_name(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name.front())) &&
         is_ident_tail(name.substr(1));
}

bool is_predicate_name(std::string_view name) {
  return !name.empty() && std::islower(static_cast<unsigned char>(name.front())) &&
         is_ident_tail(name.substr(1));
}

Term Term::constant(std::string name) {
  if (!is_constant_name(name)) throw InvariantError("invalid constant name '" + name + "'");
  return Term(Kind::constant, std::move(name));
}

Term Term::variable(std::string name) {
  if (!is_variable_name(name)) throw InvariantError("invalid variable name '" + name + "'");
  return Term(Kind::variable, std::move(name));
}

bool Atom::is_ground() const noexcept {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_constant(); });
}

Atom make_atom(std::string predicate, std::initializer_list<std::string_view> constants) {
  if (!is_predicate_name(predicate)) throw InvariantError("invalid predicate name '" + predicate + "'");
  Atom a{std::move(predicate), {}};
  for (auto c : constants) a.args.push_back(Term::constant(std::string(c)));
  return a;
}

std::vector<std::string> clause_variables(const Clause& c) {
  std::vector<std::string> out;
  auto visit = [&out](const Atom& a) {
    for (const auto& t : a.args) {
      if (t.is_variable() && std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    }
  };
  visit(c.head);
  for (const auto& b : c.body) visit(b);
  return out;
}

bool is_range_restricted(const Clause& c) {
  for (const auto& t : c.head.args) {
    if (!t.is_variable()) continue;
    bool found = std::any_of(c.body.begin(), c.body.end(), [&](const Atom& b) {
      return std::find(b.args.begin(), b.args.end(), t) != b.args.end();
    });
    if (!found) return false;
  }
  return true;
}

bool is_connected(const Clause& c) {
  // Union-find over variables: connected iff all of them share one root.
  const auto vars = clause_variables(c);
  if (vars.empty()) return true;
  std::vector<std::size_t> parent(vars.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto index = [&](const std::string& n) {
    return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), n) - vars.begin());
  };
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join_atom = [&](const Atom& a) {
    std::optional<std::size_t> first;
    for (const auto& t : a.args) {
      if (!t.is_variable()) continue;
      std::size_t v = index(t.name());
      if (!first) {
        first = v;
      } else {
        parent[find(v)] = find(*first);
      }
    }
  };
  join_atom(c.head);
  for (const auto& b : c.body) join_atom(b);
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < vars.size(); ++i) {
    if (find(i) != root) return false;
  }
  return true;
}

void check_clause(const Clause& c) {
  if (c.is_fact()) {
    if (!c.head.is_ground()) throw InvariantError("non-ground fact " + print_atom(c.head));
    return;
  }
  if (!is_range_restricted(c)) {
    std::string missing;
    for (const auto& t : c.head.args) {
      if (!t.is_variable()) continue;
      bool found = std::any_of(c.body.begin(), c.body.end(), [&](const Atom& b) {
        return std::find(b.args.begin(), b.args.end(), t) != b.args.end();
      });
      if (!found && missing.find(t.name()) == std::string::npos) {
        missing += missing.empty() ? t.name() : "," + t.name();
      }
    }
    throw InvariantError("head variables " + missing + " unbound in body");
  }
  if (!is_connected(c)) throw InvariantError("disconnected body in " + print_atom(c.head) + " clause");
}

namespace {

struct Encoded {
  std::vector<int> head;
  std::vector<detail::CoreLiteral> body;
  std::vector<std::string> constants;                      // by rank
  std::vector<std::pair<std::string, std::size_t>> preds;  // by rank
  int num_vars = 0;
};

Encoded encode(const Clause& c) {
  Encoded e;
  const auto vars = clause_variables(c);
  e.num_vars = static_cast<int>(vars.size());
  std::set<std::string> consts;
  std::set<std::pair<std::string, std::size_t>> preds;
  auto scan = [&](const Atom& a) {
    for (const auto& t : a.args) {
      if (t.is_constant()) consts.insert(t.name());
    }
  };
  scan(c.head);
  for (const auto& b : c.body) {
    scan(b);
    preds.emplace(b.predicate, b.arity());
  }
  e.constants.assign(consts.begin(), consts.end());
  e.preds.assign(preds.begin(), preds.end());
  auto code = [&](const Term& t) {
    if (t.is_variable()) {
      return static_cast<int>(std::find(vars.begin(), vars.end(), t.name()) - vars.begin());
    }
    return detail::kConstantBase +
           static_cast<int>(std::lower_bound(e.constants.begin(), e.constants.end(), t.name()) -
                            e.constants.begin());
  };
  for (const auto& t : c.head.args) e.head.push_back(code(t));
  for (const auto& b : c.body) {
    detail::CoreLiteral lit;
    lit.pred = static_cast<int>(
        std::lower_bound(e.preds.begin(), e.preds.end(), std::make_pair(b.predicate, b.arity())) -
        e.preds.begin());
    for (const auto& t : b.args) lit.args.push_back(code(t));
    e.body.push_back(std::move(lit));
  }
  return e;
}

Term decode(const Encoded& e, int code) {
  if (code >= detail::kConstantBase) {
    return Term::constant(e.constants[static_cast<std::size_t>(code - detail::kConstantBase)]);
  }
  return Term::variable("V" + std::to_string(code));
}

// Variables compare by their numeric suffix so that V2 < V10.
std::strong_ordering compare_term(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_variable()) {
    auto index = [](const std::string& n) {
      return n.size() > 1 && n[0] == 'V' &&
                     std::all_of(n.begin() + 1, n.end(), [](unsigned char d) { return std::isdigit(d); })
                 ? std::stoll(n.substr(1))
                 : -1LL;
    };
    auto ia = index(a.name());
    auto ib = index(b.name());
    if (ia != ib) return ia <=> ib;
  }
  return a.name() <=> b.name();
}

std::strong_ordering compare_atom(const Atom& a, const Atom& b) {
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  if (auto c = a.arity() <=> b.arity(); c != 0) return c;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (auto c = compare_term(a.args[i], b.args[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string clause_key(const Clause& c) { return print_clause(c); }

}  // namespace

Clause canonical(const Clause& c) {
  if (c.is_fact() && c.head.is_ground()) return c;
  const Encoded e = encode(c);
  const auto form = detail::canonical_form(e.head, e.body, e.num_vars);
  Clause out;
  out.head.predicate = c.head.predicate;
  for (int code : form.head) out.head.args.push_back(decode(e, code));
  for (const auto& lit : form.body) {
    Atom a;
    a.predicate = e.preds[static_cast<std::size_t>(lit.pred)].first;
    for (int code : lit.args) a.args.push_back(decode(e, code));
    out.body.push_back(std::move(a));
  }
  return out;
}

std::strong_ordering compare_canonical(const Clause& a, const Clause& b) {
  if (auto c = compare_atom(a.head, b.head); c != 0) return c;
  const std::size_t n = std::min(a.body.size(), b.body.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare_atom(a.body[i], b.body[i]); c != 0) return c;
  }
  return a.body.size() <=> b.body.size();
}

bool Program::add(Clause c) {
  auto key = clause_key(c);
  if (!keys_.insert(std::move(key)).second) return false;
  clauses_.push_back(std::move(c));
  return true;
}

bool Program::contains(const Clause& c) const { return keys_.contains(clause_key(c)); }

bool Program::remove(const Clause& c) {
  const auto key = clause_key(c);
  if (keys_.erase(key) == 0) return false;
  auto it = std::find_if(clauses_.begin(), clauses_.end(), [&](const Clause& x) { return clause_key(x) == key; });
  clauses_.erase(it);
  return true;
}

Program Program::unite(const Program& a, const Program& b) {
  Program out = a;
  for (const auto& c : b) out.add(c);
  return out;
}

Program program_of(std::initializer_list<Clause> clauses) {
  Program p;
  for (const auto& c : clauses) p.add(c);
  return p;
}

const PredicateDecl* BiasSpec::find_head(std::string_view name) const {
  auto it = std::find_if(head_decls.begin(), head_decls.end(), [&](auto& d) { return d.name == name; });
  return it == head_decls.end() ? nullptr : &*it;
}

const PredicateDecl* BiasSpec::find_body(std::string_view name) const {
  auto it = std::find_if(body_decls.begin(), body_decls.end(), [&](auto& d) { return d.name == name; });
  return it == body_decls.end() ? nullptr : &*it;
}

const PredicateDecl* BiasSpec::find(std::string_view name) const {
  if (const auto* h = find_head(name)) return h;
  return find_body(name);
}

bool BiasSpec::declares(std::string_view name, std::size_t arity) const {
  const auto* h = find_head(name);
  const auto* b = find_body(name);
  return (h && h->arity == arity) || (b && b->arity == arity);
}

bool BiasSpec::is_head(std::string_view name, std::size_t arity) const {
  const auto* h = find_head(name);
  return h && h->arity == arity;
}

std::set<std::string> BiasSpec::types() const {
  std::set<std::string> out;
  for (const auto* list : {&head_decls, &body_decls}) {
    for (const auto& d : *list) out.insert(d.arg_types.begin(), d.arg_types.end());
  }
  return out;
}

void BiasSpec::check() const {
  for (const auto* list : {&head_decls, &body_decls}) {
    std::set<std::string> seen;
    for (const auto& d : *list) {
      if (!seen.insert(d.name).second) throw InvariantError("duplicate declaration of " + d.name);
      if (!d.arg_types.empty() && d.arg_types.size() != d.arity) {
        throw InvariantError("arity mismatch between " + d.name + "/" + std::to_string(d.arity) +
                             " and its type signature");
      }
    }
  }
  for (const auto& h : head_decls) {
    const auto* b = find_body(h.name);
    if (b && b->arity != h.arity) throw InvariantError("conflicting arities for " + h.name);
  }
  if (max_vars == 0 || max_body == 0 || max_clauses == 0) throw InvariantError("bias bounds must be positive");
}

bool ExampleSet::add_positive(Atom a) {
  if (!a.is_ground()) throw InvariantError("non-ground example " + print_atom(a));
  if (neg_set_.contains(a)) throw InvariantError("contradictory labels for " + print_atom(a));
  if (!pos_set_.insert(a).second) return false;
  positives_.push_back(std::move(a));
  return true;
}

bool ExampleSet::add_negative(Atom a) {
  if (!a.is_ground()) throw InvariantError("non-ground example " + print_atom(a));
  if (pos_set_.contains(a)) throw InvariantError("contradictory labels for " + print_atom(a));
  if (!neg_set_.insert(a).second) return false;
  negatives_.push_back(std::move(a));
  return true;
}

bool ExampleSet::remove(const Atom& a) {
  if (pos_set_.erase(a)) {
    positives_.erase(std::find(positives_.begin(), positives_.end(), a));
    return true;
  }
  if (neg_set_.erase(a)) {
    negatives_.erase(std::find(negatives_.begin(), negatives_.end(), a));
    return true;
  }
  return false;
}

std::optional<ExampleSet> ExampleSet::try_unite(const ExampleSet& a, const ExampleSet& b) {
  for (const auto& p : b.positives_) {
    if (a.neg_set_.contains(p)) return std::nullopt;
  }
  for (const auto& n : b.negatives_) {
    if (a.pos_set_.contains(n)) return std::nullopt;
  }
  ExampleSet out = a;
  for (const auto& p : b.positives_) out.add_positive(p);
  for (const auto& n : b.negatives_) out.add_negative(n);
  return out;
}

}  // namespace rulesmith
