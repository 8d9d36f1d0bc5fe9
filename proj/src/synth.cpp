#include "rulesmith/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "rng.hpp"
#include "rulesmith/entailment.hpp"
#include "rulesmith/text_format.hpp"

namespace rulesmith::synth {

namespace {

constexpr const char* kAgent = "agent";
constexpr const char* kRunway = "runway";

const std::set<std::string>& symmetric_relations() {
  static const std::set<std::string> s{"same_runway", "parallel_runways", "intersecting_runways"};
  return s;
}

Program to_program(const std::vector<Atom>& atoms) {
  Program p;
  for (const auto& a : atoms) p.add(Clause{a, {}});
  return p;
}

}  // namespace

std::string_view to_string(Corruption c) {
  switch (c) {
    case Corruption::none: return "none";
    case Corruption::unknown_predicate: return "unknown_predicate";
    case Corruption::fact_deletion: return "fact_deletion";
    case Corruption::label_flip: return "label_flip";
  }
  return "none";
}

std::optional<Corruption> corruption_from_string(std::string_view s) {
  for (auto c : {Corruption::none, Corruption::unknown_predicate, Corruption::fact_deletion, Corruption::label_flip}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct SceneGenerator::Instance {
  std::string prefix;
  std::vector<Atom> facts;
  Atom head;
  std::vector<std::string> agents;
  std::map<std::string, std::string> type_of;  // constant -> type
  int next = 0;
  detail::Rng rng{0};

  std::string fresh(const std::string& type) {
    const char tag = type == kAgent ? 'a' : type == kRunway ? 'r' : 'o';
    std::string c = prefix + tag + std::to_string(next++);
    type_of[c] = type;
    if (type == kAgent) agents.push_back(c);
    return c;
  }
  std::vector<std::string> of_type(const std::string& type) const {
    std::vector<std::string> out;
    for (const auto& [c, t] : type_of) {
      if (t == type) out.push_back(c);
    }
    return out;
  }
};

SceneGenerator::SceneGenerator(Program rules, BiasSpec bias, std::uint64_t seed)
    : rules_(std::move(rules)), bias_(std::move(bias)), seed_(seed) {
  if (rules_.empty()) throw InvariantError("no rules to plant");
  for (const auto& r : rules_) {
    if (r.is_fact() || !is_range_restricted(r)) throw InvariantError("cannot plant " + print_clause(r));
    if (!bias_.is_head(r.head.predicate, r.head.arity())) {
      throw InvariantError("planted head " + r.head.predicate + " is not a declared head predicate");
    }
    for (const auto& b : r.body) {
      if (!bias_.declares(b.predicate, b.arity())) throw InvariantError("planted body predicate " + b.predicate + " is undeclared");
    }
    if (head_pred_.empty()) head_pred_ = r.head.predicate;
    if (r.head.predicate != head_pred_) throw InvariantError("planted rules must share one head predicate");
  }
}

std::string SceneGenerator::type_of(const std::string& pred, std::size_t pos) const {
  const PredicateDecl* d = bias_.find(pred);
  if (d && pos < d->arg_types.size()) return d->arg_types[pos];
  return "thing";
}

SceneGenerator::Instance SceneGenerator::instantiate(const std::string& prefix, const Clause& rule) {
  Instance inst;
  inst.prefix = prefix;
  inst.rng = detail::Rng(seed_, draws_++);
  std::map<std::string, std::string> sub;
  auto ground = [&](const Atom& a) {
    Atom g{a.predicate, {}};
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const Term& t = a.args[i];
      if (t.is_constant()) {
        g.args.push_back(t);
        continue;
      }
      auto it = sub.find(t.name());
      if (it == sub.end()) it = sub.emplace(t.name(), inst.fresh(type_of(a.predicate, i))).first;
      g.args.push_back(Term::constant(it->second));
    }
    return g;
  };
  inst.head = ground(rule.head);
  for (const auto& b : rule.body) inst.facts.push_back(ground(b));
  return inst;
}

void SceneGenerator::add_distractors(Instance& inst) {
  std::vector<const PredicateDecl*> activities;
  std::vector<const PredicateDecl*> relations;
  for (const auto& d : bias_.body_decls) {
    if (d.arg_types.empty()) continue;
    if (d.arg_types[0] == kAgent && std::count(d.arg_types.begin(), d.arg_types.end(), kAgent) == 1) {
      activities.push_back(&d);
    } else if (std::count(d.arg_types.begin(), d.arg_types.end(), kAgent) == 0 && d.arity == 2 &&
               symmetric_relations().contains(d.name) && d.name != "same_runway") {
      relations.push_back(&d);
    }
  }
  const std::size_t extra = activities.empty() ? 0 : inst.rng.index(3);
  for (std::size_t k = 0; k < extra; ++k) {
    const PredicateDecl& d = *inst.rng.pick(activities);
    Atom a{d.name, {Term::constant(inst.fresh(kAgent))}};
    for (std::size_t i = 1; i < d.arity; ++i) {
      const auto existing = inst.of_type(d.arg_types[i]);
      const bool reuse = !existing.empty() && inst.rng.chance(0.5);
      a.args.push_back(Term::constant(reuse ? inst.rng.pick(existing) : inst.fresh(d.arg_types[i])));
    }
    inst.facts.push_back(std::move(a));
  }
  const auto runways = inst.of_type(kRunway);
  if (!relations.empty() && runways.size() >= 2 && inst.rng.chance(0.4)) {
    const std::string& x = inst.rng.pick(runways);
    const std::string& y = inst.rng.pick(runways);
    if (x != y) inst.facts.push_back(make_atom(inst.rng.pick(relations)->name, {x, y}));
  }
}

void SceneGenerator::close_relations(Program& facts) const {
  std::set<std::string> runways;
  std::vector<Atom> extra;
  for (const auto& c : facts) {
    for (std::size_t i = 0; i < c.head.args.size(); ++i) {
      if (type_of(c.head.predicate, i) == kRunway) runways.insert(c.head.args[i].name());
    }
    if (symmetric_relations().contains(c.head.predicate) && c.head.arity() == 2) {
      extra.push_back(Atom{c.head.predicate, {c.head.args[1], c.head.args[0]}});
    }
  }
  if (bias_.declares("same_runway", 2)) {
    for (const auto& r : runways) extra.push_back(make_atom("same_runway", {r, r}));
  }
  for (auto& a : extra) facts.add(Clause{std::move(a), {}});
}

std::vector<Atom> SceneGenerator::derived(const Program& facts) const {
  std::vector<Atom> out;
  const FactStore model = consequences(facts, rules_);
  for (auto& a : model.atoms()) {
    if (a.predicate == head_pred_ && !facts.contains(Clause{a, {}})) out.push_back(std::move(a));
  }
  return out;
}

std::vector<Atom> SceneGenerator::agent_pairs(const std::vector<std::string>& agents) const {
  std::vector<Atom> out;
  for (const auto& x : agents) {
    for (const auto& y : agents) {
      if (x != y) out.push_back(make_atom(head_pred_, {x, y}));
    }
  }
  return out;
}

Scene SceneGenerator::violation(const std::string& prefix, std::size_t rule) {
  Instance inst = instantiate(prefix, rules_.clauses().at(rule));
  add_distractors(inst);
  Scene s;
  s.background = to_program(inst.facts);
  close_relations(s.background);
  for (auto& a : derived(s.background)) s.examples.add_positive(std::move(a));
  s.agents = inst.agents;
  return s;
}

Scene SceneGenerator::held_out_violation(const std::string& prefix, std::size_t rule) {
  Scene s = violation(prefix, rule);
  for (auto& a : agent_pairs(s.agents)) {
    if (!s.examples.has_positive(a)) s.examples.add_negative(std::move(a));
  }
  return s;
}

std::optional<SceneGenerator::Instance> SceneGenerator::near_miss(const std::string& prefix, std::size_t rule) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    detail::Rng pick(seed_, draws_++);
    Instance inst = instantiate(prefix, rules_.clauses()[rule]);
    switch (pick.index(3)) {
      case 0: {
        std::map<std::string, int> uses;
        for (const auto& t : inst.head.args) ++uses[t.name()];
        for (const auto& f : inst.facts) {
          for (const auto& t : f.args) ++uses[t.name()];
        }
        std::vector<std::pair<std::size_t, std::size_t>> joins;
        for (std::size_t i = 0; i < inst.facts.size(); ++i) {
          for (std::size_t k = 0; k < inst.facts[i].args.size(); ++k) {
            if (uses[inst.facts[i].args[k].name()] > 1) joins.emplace_back(i, k);
          }
        }
        if (joins.empty()) continue;
        const auto [i, k] = pick.pick(joins);
        const std::string type = inst.type_of[inst.facts[i].args[k].name()];
        inst.facts[i].args[k] = Term::constant(inst.fresh(type));
        break;
      }
      case 1: {
        Atom& lit = inst.facts[pick.index(inst.facts.size())];
        const PredicateDecl* self = bias_.find_body(lit.predicate);
        std::vector<std::string> alternatives;
        for (const auto& d : bias_.body_decls) {
          if (d.name != lit.predicate && d.arity == lit.arity() && self && d.arg_types == self->arg_types) {
            alternatives.push_back(d.name);
          }
        }
        if (alternatives.empty()) continue;
        lit.predicate = pick.pick(alternatives);
        break;
      }
      default:
        if (inst.facts.size() < 2) continue;
        inst.facts.erase(inst.facts.begin() + static_cast<std::ptrdiff_t>(pick.index(inst.facts.size())));
        break;
    }
    add_distractors(inst);
    Program facts = to_program(inst.facts);
    close_relations(facts);
    if (derived(facts).empty()) return inst;
  }
  return std::nullopt;
}

Scene SceneGenerator::nominal(const std::string& prefix) {
  // A routine-operations snapshot: one near miss of every rule, each over its
  // own constants.
  Scene s;
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    auto inst = near_miss(prefix + "c" + std::to_string(r), r);
    if (!inst) throw InvariantError("could not generate a nominal scene the planted rules leave safe");
    for (auto& f : inst->facts) s.background.add(Clause{std::move(f), {}});
    s.agents.insert(s.agents.end(), inst->agents.begin(), inst->agents.end());
  }
  close_relations(s.background);
  if (!derived(s.background).empty()) throw InvariantError("near misses combined into a violation");
  for (auto& a : agent_pairs(s.agents)) s.examples.add_negative(std::move(a));
  return s;
}

std::pair<Scene, Scene> SceneGenerator::damaged_violation(const std::string& prefix, const std::string& twin_prefix,
                                                          std::size_t rule) {
  Instance inst = instantiate(prefix, rules_.clauses().at(rule));
  inst.facts.erase(inst.facts.begin() + static_cast<std::ptrdiff_t>(inst.rng.index(inst.facts.size())));
  add_distractors(inst);
  Scene damaged;
  damaged.background = to_program(inst.facts);
  close_relations(damaged.background);
  damaged.examples.add_positive(inst.head);
  for (auto& a : derived(damaged.background)) damaged.examples.add_positive(std::move(a));
  damaged.agents = inst.agents;

  auto rename = [&](const std::string& c) { return twin_prefix + c.substr(prefix.size()); };
  auto rename_atom = [&](const Atom& a) {
    Atom out{a.predicate, {}};
    for (const auto& t : a.args) out.args.push_back(Term::constant(rename(t.name())));
    return out;
  };
  Scene twin;
  for (const auto& c : damaged.background) twin.background.add(Clause{rename_atom(c.head), {}});
  for (const auto& a : damaged.agents) twin.agents.push_back(rename(a));
  const auto twin_derived = derived(twin.background);
  const std::set<Atom> skip(twin_derived.begin(), twin_derived.end());
  for (auto& a : agent_pairs(twin.agents)) {
    if (!skip.contains(a)) twin.examples.add_negative(std::move(a));
  }
  return {std::move(damaged), std::move(twin)};
}

Scene SceneGenerator::flipped(const std::string& prefix, std::size_t rule) {
  Scene s = violation(prefix, rule);
  ExampleSet labels;
  for (const auto& a : s.examples.positives()) labels.add_negative(a);
  for (auto& a : agent_pairs(s.agents)) {
    if (!labels.has_negative(a)) labels.add_negative(std::move(a));
  }
  s.examples = std::move(labels);
  return s;
}

namespace {

std::string padded(char tag, std::size_t i, std::size_t n) {
  const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", tag, width, i);
  return buf;
}

std::string bundle_background(const Scene& s) { return print_program(s.background); }
std::string bundle_examples(const Scene& s) { return print_examples(s.examples); }

void append(Scene& into, const Scene& extra) {
  into.background = Program::unite(into.background, extra.background);
  for (const auto& a : extra.examples.positives()) into.examples.add_positive(a);
  for (const auto& a : extra.examples.negatives()) {
    if (!into.examples.has_positive(a)) into.examples.add_negative(a);
  }
  into.agents.insert(into.agents.end(), extra.agents.begin(), extra.agents.end());
}

}  // namespace

Corpus generate_corpus(const GenConfig& config) {
  Corpus corpus;
  const std::size_t n = config.subsets;
  if (n == 0) return corpus;
  SceneGenerator gen(config.rules, config.bias, config.seed);

  std::vector<std::size_t> rule_of(n);
  for (std::size_t i = 0; i < n; ++i) rule_of[i] = i % gen.rule_count();
  detail::Rng(config.seed, 1).shuffle(rule_of);

  const double frac = std::clamp(config.corruption, 0.0, 1.0);
  const auto corrupted = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  detail::Rng pick(config.seed, 2);
  pick.shuffle(order);
  std::vector<Corruption> kind(n, Corruption::none);
  static constexpr Corruption kinds[] = {Corruption::unknown_predicate, Corruption::fact_deletion,
                                         Corruption::label_flip};
  for (std::size_t k = 0; k < corrupted; ++k) kind[order[k]] = kinds[pick.index(3)];

  const auto base = *ingest::parse_timestamp("2024-01-01T00:00:00Z");
  detail::Rng clock(config.seed, 3);
  std::vector<ingest::SourceRecord> violations, nominals;
  for (std::size_t i = 0; i < n; ++i) {
    const auto offset = std::chrono::hours(6 * static_cast<long>(i)) + std::chrono::minutes(clock.index(300));
    violations.push_back({padded('v', i + 1, n), ingest::RecordKind::violation, base + offset, {}});
    nominals.push_back({padded('n', i + 1, n), ingest::RecordKind::nominal,
                        base + offset + std::chrono::minutes(clock.index(300)), {}});
  }
  const auto pairs = ingest::pair_subsets(violations, nominals, config.seed);

  std::map<std::string, Scene> nominal_scene;
  for (const auto& r : nominals) nominal_scene.emplace(r.id, gen.nominal(r.id));

  for (std::size_t i = 0; i < n; ++i) {
    PlannedSubset s;
    s.records = pairs[i];
    s.id = ingest::subset_id(pairs[i]);
    s.planted_rule = rule_of[i];
    s.corruption = kind[i];
    const std::string& vid = pairs[i].violation.id;
    const std::string& nid = pairs[i].nominal.id;
    Scene v;
    Scene nom = nominal_scene.at(nid);
    std::string extra_facts;
    switch (s.corruption) {
      case Corruption::fact_deletion: {
        auto [damaged, twin] = gen.damaged_violation(vid, nid + "t", s.planted_rule);
        v = std::move(damaged);
        append(nom, twin);
        break;
      }
      case Corruption::label_flip:
        v = gen.violation(vid, s.planted_rule);
        append(nom, gen.flipped(nid + "f", gen.rule_count() > 1 ? (s.planted_rule + 1) % gen.rule_count() : 0));
        break;
      case Corruption::unknown_predicate:
        v = gen.violation(vid, s.planted_rule);
        extra_facts = "taxi_speed(" + (v.agents.empty() ? vid : v.agents.front()) + ",fast).\n";
        break;
      case Corruption::none:
        v = gen.violation(vid, s.planted_rule);
        break;
    }
    s.records.violation.payload = bundle_background(v) + extra_facts + bundle_examples(v);
    s.records.nominal.payload = bundle_background(nom) + bundle_examples(nom);
    s.background_text = bundle_background(v) + extra_facts + bundle_background(nom);
    s.examples_text = bundle_examples(v) + bundle_examples(nom);
    corpus.subsets.push_back(std::move(s));
  }
  return corpus;
}

std::vector<eval::Scenario> generate_scenarios(const Program& rules, const BiasSpec& bias, std::size_t count,
                                               std::uint64_t seed) {
  SceneGenerator gen(rules, bias, seed);
  std::vector<eval::Scenario> out;
  for (std::size_t k = 0; k < count; ++k) {
    eval::Scenario sc;
    sc.id = padded('h', k + 1, count);
    Scene s;
    if (k % 2 == 0) {
      const std::size_t rule = (k / 2) % gen.rule_count();
      s = gen.held_out_violation(sc.id, rule);
      sc.tags = {"violation", "rule-" + std::to_string(rule + 1)};
    } else {
      s = gen.nominal(sc.id);
      sc.tags = {"nominal"};
    }
    sc.background = std::move(s.background);
    sc.examples = std::move(s.examples);
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace rulesmith::synth
