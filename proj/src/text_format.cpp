#include "rulesmith/text_format.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace rulesmith {
namespace {

enum class Tok { ident, lparen, rparen, comma, neck, dot, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '%') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::ident, std::string(s.substr(i, j - i)), line});
      i = j;
    } else if (c == '(') {
      out.push_back({Tok::lparen, "(", line});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::rparen, ")", line});
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::comma, ",", line});
      ++i;
    } else if (c == '.') {
      out.push_back({Tok::dot, ".", line});
      ++i;
    } else if (c == ':' && i + 1 < s.size() && s[i + 1] == '-') {
      out.push_back({Tok::neck, ":-", line});
      i += 2;
    } else {
      throw ParseError(line, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::end, "", line});
  return out;
}

// Generic term tree: `name`, `name(args...)`, or a parenthesised tuple.
struct Expr {
  enum class Kind { ident, compound, tuple } kind;
  std::string name;
  std::vector<Expr> args;
  std::size_t line;
};

struct Statement {
  Expr head;
  std::vector<Expr> body;
  bool has_neck = false;
  std::size_t line;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : toks_(tokenize(text)) {}

  std::optional<Statement> next() {
    if (peek().kind == Tok::end) return std::nullopt;
    Statement st;
    st.line = peek().line;
    st.head = expr();
    if (peek().kind == Tok::neck) {
      take();
      st.has_neck = true;
      st.body.push_back(expr());
      while (peek().kind == Tok::comma) {
        take();
        st.body.push_back(expr());
      }
    }
    if (peek().kind == Tok::end) throw ParseError(st.line, "unterminated clause (missing '.')");
    expect(Tok::dot, "'.'");
    return st;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) {
      const auto& t = peek();
      throw ParseError(t.line, std::string("expected ") + what + ", found " +
                                   (t.kind == Tok::end ? std::string("end of input") : "'" + t.text + "'"));
    }
    take();
  }

  std::vector<Expr> arg_list(bool allow_trailing_comma) {
    std::vector<Expr> args;
    expect(Tok::lparen, "'('");
    if (peek().kind == Tok::rparen && allow_trailing_comma) {
      take();
      return args;
    }
    args.push_back(expr());
    while (peek().kind == Tok::comma) {
      take();
      if (allow_trailing_comma && peek().kind == Tok::rparen) break;
      args.push_back(expr());
    }
    expect(Tok::rparen, "')'");
    return args;
  }

  Expr expr() {
    const auto& t = peek();
    if (t.kind == Tok::ident) {
      Expr e{Expr::Kind::ident, take().text, {}, t.line};
      if (peek().kind == Tok::lparen) {
        e.kind = Expr::Kind::compound;
        e.args = arg_list(false);
      }
      return e;
    }
    if (t.kind == Tok::lparen) {
      const std::size_t line = t.line;
      return Expr{Expr::Kind::tuple, {}, arg_list(true), line};
    }
    if (t.kind == Tok::end) throw ParseError(t.line, "unterminated clause (missing '.')");
    throw ParseError(t.line, "unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Term to_term(const Expr& e) {
  if (e.kind != Expr::Kind::ident) throw ParseError(e.line, "expected a constant or variable");
  if (is_variable_name(e.name)) return Term::variable(e.name);
  if (is_constant_name(e.name)) return Term::constant(e.name);
  throw ParseError(e.line, "invalid identifier '" + e.name + "'");
}

Atom to_atom(const Expr& e) {
  if (e.kind == Expr::Kind::tuple || !is_predicate_name(e.name)) {
    throw ParseError(e.line, "expected an atom" + (e.name.empty() ? std::string() : ", found '" + e.name + "'"));
  }
  Atom a{e.name, {}};
  for (const auto& x : e.args) a.args.push_back(to_term(x));
  return a;
}

Clause to_clause(const Statement& st) {
  if (st.has_neck && st.body.empty()) throw ParseError(st.line, "empty body after ':-'");
  Clause c{to_atom(st.head), {}};
  for (const auto& b : st.body) c.body.push_back(to_atom(b));
  try {
    check_clause(c);
  } catch (const InvariantError& err) {
    throw ParseError(st.line, err.what());
  }
  return c;
}

std::size_t to_count(const Expr& e, const char* what) {
  if (e.kind != Expr::Kind::ident) throw ParseError(e.line, std::string("expected ") + what);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(e.name.data(), e.name.data() + e.name.size(), v);
  if (ec != std::errc{} || ptr != e.name.data() + e.name.size()) {
    throw ParseError(e.line, std::string("expected ") + what + ", found '" + e.name + "'");
  }
  return v;
}

}  // namespace

Program parse_facts(std::string_view text) {
  Reader r(text);
  Program p;
  while (auto st = r.next()) {
    if (st->has_neck) throw ParseError(st->line, "expected a fact, found a rule");
    Atom a = to_atom(st->head);
    if (!a.is_ground()) throw ParseError(st->line, "non-ground fact " + print_atom(a));
    p.add(Clause{std::move(a), {}});
  }
  return p;
}

ExampleSet parse_examples(std::string_view text, const BiasSpec* bias) {
  Reader r(text);
  ExampleSet out;
  while (auto st = r.next()) {
    const Expr& h = st->head;
    if (st->has_neck || h.kind != Expr::Kind::compound || (h.name != "pos" && h.name != "neg") ||
        h.args.size() != 1) {
      throw ParseError(st->line, "expected pos(atom) or neg(atom)");
    }
    Atom a = to_atom(h.args.front());
    if (!a.is_ground()) throw ParseError(st->line, "non-ground example " + print_atom(a));
    if (bias && !bias->is_head(a.predicate, a.arity())) {
      throw ParseError(st->line, print_atom(a) + " is not over a declared head predicate");
    }
    try {
      if (h.name == "pos") {
        out.add_positive(std::move(a));
      } else {
        out.add_negative(std::move(a));
      }
    } catch (const InvariantError& err) {
      throw ParseError(st->line, err.what());
    }
  }
  return out;
}

BiasSpec parse_bias(std::string_view text) {
  Reader r(text);
  BiasSpec b;
  std::vector<std::pair<std::string, std::pair<std::vector<std::string>, std::size_t>>> types;
  std::set<std::string> bounds_seen;
  while (auto st = r.next()) {
    const Expr& h = st->head;
    if (st->has_neck || h.kind != Expr::Kind::compound) throw ParseError(st->line, "expected a bias directive");
    if (h.name == "head_pred" || h.name == "body_pred") {
      if (h.args.size() != 2) throw ParseError(st->line, h.name + " takes (predicate, arity)");
      const Expr& p = h.args[0];
      if (p.kind != Expr::Kind::ident || !is_predicate_name(p.name)) {
        throw ParseError(st->line, "invalid predicate name in " + h.name);
      }
      auto& list = h.name == "head_pred" ? b.head_decls : b.body_decls;
      for (const auto& d : list) {
        if (d.name == p.name) throw ParseError(st->line, "duplicate declaration " + h.name + "(" + p.name + ")");
      }
      list.push_back(PredicateDecl{p.name, to_count(h.args[1], "an arity"), {}});
    } else if (h.name == "type") {
      if (h.args.size() != 2 || h.args[0].kind != Expr::Kind::ident) {
        throw ParseError(st->line, "type takes (predicate, (t1,...,tk))");
      }
      std::vector<std::string> sig;
      const Expr& t = h.args[1];
      if (t.kind == Expr::Kind::tuple) {
        for (const auto& x : t.args) {
          if (x.kind != Expr::Kind::ident || !is_predicate_name(x.name)) throw ParseError(st->line, "invalid type name");
          sig.push_back(x.name);
        }
      } else if (t.kind == Expr::Kind::ident && is_predicate_name(t.name)) {
        sig.push_back(t.name);
      } else {
        throw ParseError(st->line, "invalid type signature");
      }
      for (const auto& [name, _] : types) {
        if (name == h.args[0].name) throw ParseError(st->line, "duplicate type declaration for " + name);
      }
      types.push_back({h.args[0].name, {std::move(sig), st->line}});
    } else if (h.name == "max_vars" || h.name == "max_body" || h.name == "max_clauses") {
      if (h.args.size() != 1) throw ParseError(st->line, h.name + " takes one number");
      if (!bounds_seen.insert(h.name).second) throw ParseError(st->line, "duplicate " + h.name);
      const std::size_t v = to_count(h.args[0], "a positive number");
      if (v == 0) throw ParseError(st->line, h.name + " must be positive");
      (h.name == "max_vars" ? b.max_vars : h.name == "max_body" ? b.max_body : b.max_clauses) = v;
    } else {
      throw ParseError(st->line, "unknown directive " + h.name);
    }
  }
  for (auto& [name, sig_line] : types) {
    auto& [sig, line] = sig_line;
    bool found = false;
    for (auto* list : {&b.head_decls, &b.body_decls}) {
      for (auto& d : *list) {
        if (d.name != name) continue;
        found = true;
        if (d.arity != sig.size()) {
          throw ParseError(line, "arity mismatch: " + name + "/" + std::to_string(d.arity) + " has " +
                                     std::to_string(sig.size()) + " types");
        }
        d.arg_types = sig;
      }
    }
    if (!found) throw ParseError(line, "type declared for undeclared predicate " + name);
  }
  try {
    b.check();
  } catch (const InvariantError& err) {
    throw ParseError(1, err.what());
  }
  return b;
}

Clause parse_clause(std::string_view text) {
  Reader r(text);
  auto st = r.next();
  if (!st) throw ParseError(1, "empty input, expected a clause");
  Clause c = to_clause(*st);
  if (auto extra = r.next()) throw ParseError(extra->line, "expected a single clause");
  return c;
}

Program parse_rules(std::string_view text) {
  Reader r(text);
  Program p;
  while (auto st = r.next()) p.add(to_clause(*st));
  return p;
}

std::string print_term(const Term& t) { return t.name(); }

std::string print_atom(const Atom& a) {
  std::string s = a.predicate;
  if (a.args.empty()) return s;
  s += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += a.args[i].name();
  }
  s += ')';
  return s;
}

std::string print_clause(const Clause& c) {
  if (c.is_fact() && c.head.is_ground()) return print_atom(c.head) + ".";
  const Clause k = canonical(c);
  std::string s = print_atom(k.head);
  if (!k.body.empty()) {
    s += ":- ";
    for (std::size_t i = 0; i < k.body.size(); ++i) {
      if (i) s += ',';
      s += print_atom(k.body[i]);
    }
  }
  return s + ".";
}

std::string print_program(const Program& p) {
  std::string s;
  for (const auto& c : p) s += print_clause(c) + "\n";
  return s;
}

std::string print_examples(const ExampleSet& e) {
  std::string s;
  for (const auto& a : e.positives()) s += "pos(" + print_atom(a) + ").\n";
  for (const auto& a : e.negatives()) s += "neg(" + print_atom(a) + ").\n";
  return s;
}

std::string print_bias(const BiasSpec& b) {
  std::string s;
  for (const auto& d : b.head_decls) s += "head_pred(" + d.name + "," + std::to_string(d.arity) + ").\n";
  for (const auto& d : b.body_decls) s += "body_pred(" + d.name + "," + std::to_string(d.arity) + ").\n";
  std::set<std::string> typed;
  for (const auto* list : {&b.head_decls, &b.body_decls}) {
    for (const auto& d : *list) {
      if (d.arg_types.empty() || !typed.insert(d.name).second) continue;
      s += "type(" + d.name + ",(";
      for (std::size_t i = 0; i < d.arg_types.size(); ++i) {
        if (i) s += ',';
        s += d.arg_types[i];
      }
      s += d.arg_types.size() == 1 ? ",)).\n" : ")).\n";
    }
  }
  s += "max_vars(" + std::to_string(b.max_vars) + ").\n";
  s += "max_body(" + std::to_string(b.max_body) + ").\n";
  s += "max_clauses(" + std::to_string(b.max_clauses) + ").\n";
  return s;
}

}  // namespace rulesmith
