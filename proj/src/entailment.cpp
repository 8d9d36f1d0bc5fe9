#include "rulesmith/entailment.hpp"

#include <algorithm>

#include "join.hpp"
#include "rulesmith/text_format.hpp"

namespace rulesmith {

Relation::Relation(std::size_t arity) : arity_(arity), columns_(arity) {}

std::uint64_t Relation::hash(std::span<const std::uint32_t> row) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::uint32_t v : row) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool Relation::contains(std::span<const std::uint32_t> row) const {
  auto it = buckets_.find(hash(row));
  if (it == buckets_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](std::uint32_t r) { return std::ranges::equal(this->row(r), row); });
}

bool Relation::insert(std::span<const std::uint32_t> row) {
  auto& bucket = buckets_[hash(row)];
  for (std::uint32_t r : bucket) {
    if (std::ranges::equal(this->row(r), row)) return false;
  }
  const auto index = static_cast<std::uint32_t>(count_++);
  bucket.push_back(index);
  data_.insert(data_.end(), row.begin(), row.end());
  for (std::size_t c = 0; c < arity_; ++c) {
    auto& index_c = columns_[c];
    if (row[c] >= index_c.size()) index_c.resize(row[c] + 1);
    index_c[row[c]].push_back(index);
  }
  return true;
}

std::span<const std::uint32_t> Relation::rows_with(std::size_t column, std::uint32_t value) const {
  const auto& index = columns_[column];
  if (value >= index.size()) return {};
  return index[value];
}

FactStore::FactStore(const Program& facts) {
  for (const auto& c : facts) {
    if (!c.is_fact()) throw InvariantError("background contains a rule: " + print_clause(c));
    insert(c.head);
  }
}

std::optional<std::uint32_t> FactStore::constant_id(std::string_view name) const {
  auto it = constant_ids_.find(std::string(name));
  if (it == constant_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FactStore::intern_constant(std::string_view name) {
  auto [it, fresh] = constant_ids_.try_emplace(std::string(name), static_cast<std::uint32_t>(constants_.size()));
  if (fresh) constants_.emplace_back(name);
  return it->second;
}

std::optional<std::uint32_t> FactStore::predicate_id(std::string_view name, std::size_t arity) const {
  auto it = predicate_ids_.find(std::make_pair(std::string(name), arity));
  if (it == predicate_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FactStore::intern_predicate(std::string_view name, std::size_t arity) {
  if (arity > detail::kMaxArity) {
    throw InvariantError("arity " + std::to_string(arity) + " of " + std::string(name) + " exceeds the supported maximum");
  }
  auto key = std::make_pair(std::string(name), arity);
  auto [it, fresh] = predicate_ids_.try_emplace(key, static_cast<std::uint32_t>(predicates_.size()));
  if (fresh) {
    predicates_.push_back(std::move(key));
    relations_.emplace_back(arity);
  }
  return it->second;
}

bool FactStore::insert_row(std::uint32_t pred, std::span<const std::uint32_t> row) {
  if (!relations_[pred].insert(row)) return false;
  ++size_;
  return true;
}

bool FactStore::insert(const Atom& ground) {
  if (!ground.is_ground()) throw InvariantError("non-ground atom " + print_atom(ground));
  const auto pred = intern_predicate(ground.predicate, ground.arity());
  std::uint32_t row[detail::kMaxArity];
  for (std::size_t i = 0; i < ground.arity(); ++i) row[i] = intern_constant(ground.args[i].name());
  return insert_row(pred, {row, ground.arity()});
}

bool FactStore::contains(const Atom& ground) const {
  const auto pred = predicate_id(ground.predicate, ground.arity());
  if (!pred) return false;
  std::uint32_t row[detail::kMaxArity];
  for (std::size_t i = 0; i < ground.arity(); ++i) {
    if (!ground.args[i].is_constant()) return false;
    const auto id = constant_id(ground.args[i].name());
    if (!id) return false;
    row[i] = *id;
  }
  return relations_[*pred].contains({row, ground.arity()});
}

std::vector<Atom> FactStore::atoms() const {
  std::vector<Atom> out;
  out.reserve(size_);
  for (std::uint32_t p = 0; p < predicates_.size(); ++p) {
    const Relation& rel = relations_[p];
    for (std::size_t r = 0; r < rel.size(); ++r) {
      Atom a{predicates_[p].first, {}};
      for (std::uint32_t v : rel.row(r)) a.args.push_back(Term::constant(constants_[v]));
      out.push_back(std::move(a));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> FactStore::universe() const {
  std::vector<std::string> out = constants_;
  std::sort(out.begin(), out.end());
  return out;
}

void FactStore::add_universe(const ExampleSet& examples) {
  for (const auto* list : {&examples.positives(), &examples.negatives()}) {
    for (const auto& a : *list) {
      for (const auto& t : a.args) intern_constant(t.name());
    }
  }
}

namespace {

using detail::CompiledRule;
using detail::JoinLiteral;
using detail::JoinTerm;

// Compiles `r` against `store`, interning every symbol.
CompiledRule compile_interning(FactStore& store, const Clause& r) {
  if (r.body.size() > detail::kMaxBody) throw InvariantError("clause body too long");
  CompiledRule out;
  std::vector<std::string> vars = clause_variables(r);
  out.num_vars = vars.size();
  auto term = [&](const Term& t) {
    if (t.is_variable()) {
      return JoinTerm{true, static_cast<std::uint32_t>(std::find(vars.begin(), vars.end(), t.name()) - vars.begin())};
    }
    return JoinTerm{false, store.intern_constant(t.name())};
  };
  out.head_pred = store.intern_predicate(r.head.predicate, r.head.arity());
  for (const auto& t : r.head.args) out.head.push_back(term(t));
  for (const auto& b : r.body) {
    out.body_preds.push_back(store.intern_predicate(b.predicate, b.arity()));
    JoinLiteral lit;
    for (const auto& t : b.args) lit.args.push_back(term(t));
    out.body.push_back(std::move(lit));
  }
  return out;
}

}  // namespace

FactStore consequences(const Program& b, const Program& h) {
  FactStore store(b);
  std::vector<CompiledRule> rules;
  for (const auto& c : h) {
    if (c.is_fact()) {
      store.insert(c.head);
    } else {
      if (!is_range_restricted(c)) throw InvariantError("rule is not range-restricted: " + print_clause(c));
      rules.push_back(compile_interning(store, c));
    }
  }
  if (rules.empty()) return store;

  // Semi-naive: each round joins at least one literal against the facts
  // that were new in the previous round.
  const std::size_t npred = store.predicate_count();
  std::vector<Relation> delta;
  delta.reserve(npred);
  for (std::uint32_t p = 0; p < npred; ++p) delta.push_back(store.relation(p));

  std::vector<std::uint32_t> binding;
  std::uint32_t head_row[detail::kMaxArity];
  while (true) {
    std::vector<Relation> next;
    next.reserve(npred);
    for (std::uint32_t p = 0; p < npred; ++p) next.emplace_back(store.relation(p).arity());
    bool any = false;
    for (auto& rule : rules) {
      for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (delta[rule.body_preds[i]].empty()) continue;
        for (std::size_t j = 0; j < rule.body.size(); ++j) {
          rule.body[j].relation = j == i ? &delta[rule.body_preds[j]] : &store.relation(rule.body_preds[j]);
        }
        binding.assign(rule.num_vars, detail::kUnbound);
        detail::Joiner joiner(rule.body);
        joiner.run(binding, [&](const std::vector<std::uint32_t>& bnd) {
          for (std::size_t k = 0; k < rule.head.size(); ++k) {
            head_row[k] = rule.head[k].variable ? bnd[rule.head[k].value] : rule.head[k].value;
          }
          std::span<const std::uint32_t> row{head_row, rule.head.size()};
          if (!store.relation(rule.head_pred).contains(row) && next[rule.head_pred].insert(row)) any = true;
          return true;
        });
      }
    }
    if (!any) break;
    for (std::uint32_t p = 0; p < npred; ++p) {
      for (std::size_t r = 0; r < next[p].size(); ++r) store.insert_row(p, next[p].row(r));
    }
    delta = std::move(next);
  }
  return store;
}

bool entails(const Program& b, const Program& h, const Atom& e) {
  if (!e.is_ground()) throw InvariantError("query atom is not ground: " + print_atom(e));
  return consequences(b, h).contains(e);
}

Coverage coverage(const Program& b, const Program& h, const ExampleSet& exs) {
  Coverage out;
  if (exs.empty()) return out;
  const FactStore model = consequences(b, h);
  for (const auto& e : exs.positives()) {
    if (model.contains(e)) out.covered_pos.push_back(e);
  }
  for (const auto& e : exs.negatives()) {
    if (model.contains(e)) out.covered_neg.push_back(e);
  }
  return out;
}

std::vector<Atom> derive_once(const FactStore& store, const Clause& r) {
  if (!is_range_restricted(r)) throw InvariantError("rule is not range-restricted: " + print_clause(r));
  if (r.body.size() > detail::kMaxBody) throw InvariantError("clause body too long");
  const std::vector<std::string> vars = clause_variables(r);
  std::vector<JoinLiteral> lits;
  for (const auto& b : r.body) {
    JoinLiteral lit;
    const auto pred = store.predicate_id(b.predicate, b.arity());
    if (pred) lit.relation = &store.relation(*pred);
    for (const auto& t : b.args) {
      if (t.is_variable()) {
        lit.args.push_back({true, static_cast<std::uint32_t>(std::find(vars.begin(), vars.end(), t.name()) - vars.begin())});
      } else if (auto id = store.constant_id(t.name())) {
        lit.args.push_back({false, *id});
      } else {
        lit.relation = nullptr;
        lit.args.push_back({false, 0});
      }
    }
    lits.push_back(std::move(lit));
  }
  std::vector<Atom> out;
  std::set<Atom> seen;
  std::vector<std::uint32_t> binding(vars.size(), detail::kUnbound);
  detail::Joiner joiner(lits);
  joiner.run(binding, [&](const std::vector<std::uint32_t>& bnd) {
    Atom a{r.head.predicate, {}};
    for (const auto& t : r.head.args) {
      if (t.is_constant()) {
        a.args.push_back(t);
      } else {
        const auto v = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), t.name()) - vars.begin());
        a.args.push_back(Term::constant(store.constant_name(bnd[v])));
      }
    }
    if (seen.insert(a).second) out.push_back(std::move(a));
    return true;
  });
  return out;
}

std::size_t rule_support(const Clause& r, const FactStore& b, std::span<const Atom> pos) {
  const bool recursive = std::any_of(r.body.begin(), r.body.end(), [&](const Atom& a) {
    return a.predicate == r.head.predicate && a.arity() == r.head.arity();
  });
  if (recursive || r.is_fact()) {
    Program facts;
    for (auto& a : b.atoms()) facts.add(Clause{std::move(a), {}});
    Program single;
    single.add(r);
    const FactStore model = consequences(facts, single);
    return static_cast<std::size_t>(std::count_if(pos.begin(), pos.end(), [&](const Atom& e) { return model.contains(e); }));
  }
  const auto derived = derive_once(b, r);
  const std::set<Atom> extra(derived.begin(), derived.end());
  return static_cast<std::size_t>(std::count_if(
      pos.begin(), pos.end(), [&](const Atom& e) { return b.contains(e) || extra.contains(e); }));
}

std::size_t rule_support(const Clause& r, const Program& b, std::span<const Atom> pos) {
  return rule_support(r, FactStore(b), pos);
}

}  // namespace rulesmith
