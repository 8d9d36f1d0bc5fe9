#include "rulesmith/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <set>
#include <stdexcept>

#include "rng.hpp"
#include "rulesmith/entailment.hpp"
#include "rulesmith/text_format.hpp"

namespace rulesmith::pipeline {

void PipelineConfig::check() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvariantError("rho must lie in [0,1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvariantError("tau must lie in (0,1]");
  if (max_retries < 1) throw InvariantError("max_retries must be positive");
  if (validation_attempts < 1) throw InvariantError("validation_attempts must be positive");
  if (timeout.count() < 0) throw InvariantError("timeout must be non-negative");
  for (const auto& b : {max_vars, max_body, max_clauses}) {
    if (b && *b == 0) throw InvariantError("solver bounds must be positive");
  }
}

BiasSpec PipelineConfig::effective_bias(const BiasSpec& bias) const {
  BiasSpec out = bias;
  if (max_vars) out.max_vars = *max_vars;
  if (max_body) out.max_body = *max_body;
  if (max_clauses) out.max_clauses = *max_clauses;
  return out;
}

namespace {

// Runs body(i) for i in [0, n), in parallel when asked, and rethrows the
// first exception (by index) afterwards.
template <typename F>
void for_each_index(std::size_t n, bool parallel, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SolverResult run_solver(const Solver& solver, const Program& b, const ExampleSet& e, const BiasSpec& bias,
                        const PipelineConfig& config) {
  SolverRequest req;
  req.background = b;
  req.examples = e;
  req.bias = bias;
  req.timeout = config.timeout;
  req.seed = config.seed;
  return solver.solve(req);
}

void note(std::vector<std::string>& out, std::string msg) {
  if (std::find(out.begin(), out.end(), msg) == out.end()) out.push_back(std::move(msg));
}

}  // namespace

// ---- Level 1 ------------------------------------------------------------

std::vector<std::string> ValidationRecord::reasons() const {
  std::vector<std::string> out;
  for (const auto& a : attempts) {
    for (const auto& r : a.reasons) note(out, r);
  }
  return out;
}

std::vector<std::string> bundle_problems(const ingest::RawBundle& raw, const BiasSpec& bias, Program* background,
                                         ExampleSet* examples) {
  std::vector<std::string> problems;
  for (const auto& i : raw.issues) note(problems, i);

  Program b;
  ExampleSet e;
  bool parsed = true;
  try {
    b = parse_facts(raw.background_text);
  } catch (const ParseError& err) {
    note(problems, "background line " + std::to_string(err.line()) + ": " + err.detail());
    parsed = false;
  }
  try {
    e = parse_examples(raw.examples_text);
  } catch (const ParseError& err) {
    note(problems, "examples line " + std::to_string(err.line()) + ": " + err.detail());
    parsed = false;
  } catch (const InvariantError& err) {
    note(problems, std::string("examples: ") + err.what());
    parsed = false;
  }
  if (!parsed) return problems;

  for (const auto& c : b) {
    if (!bias.declares(c.head.predicate, c.head.arity())) {
      note(problems, "unknown predicate " + c.head.predicate + "/" + std::to_string(c.head.arity()));
    }
  }
  auto check_example = [&](const Atom& a) {
    if (!bias.is_head(a.predicate, a.arity())) {
      note(problems, "example predicate " + a.predicate + "/" + std::to_string(a.arity()) + " is not a head predicate");
    }
  };
  for (const auto& a : e.positives()) check_example(a);
  for (const auto& a : e.negatives()) check_example(a);

  std::map<std::string, std::string> type_of;
  auto check_types = [&](const Atom& a) {
    const PredicateDecl* d = bias.find(a.predicate);
    if (!d || d->arity != a.arity()) return;
    for (std::size_t i = 0; i < a.args.size() && i < d->arg_types.size(); ++i) {
      const std::string& t = d->arg_types[i];
      if (t.empty()) continue;
      const auto [it, fresh] = type_of.emplace(a.args[i].name(), t);
      if (!fresh && it->second != t) note(problems, "type conflict: " + a.args[i].name());
    }
  };
  for (const auto& c : b) check_types(c.head);
  for (const auto& a : e.positives()) check_types(a);
  for (const auto& a : e.negatives()) check_types(a);

  if (e.positives().empty()) note(problems, "no positive example");

  if (problems.empty()) {
    if (background) *background = std::move(b);
    if (examples) *examples = std::move(e);
  }
  return problems;
}

Validation validate_bundle(const SubsetSource& source, const BiasSpec& bias, int attempts) {
  Validation v;
  v.record.id = source.id;
  for (int n = 1; n <= attempts; ++n) {
    const ingest::RawBundle raw = source.attempt(n);
    SubsetInstance inst;
    AttemptLog log{n, bundle_problems(raw, bias, &inst.background, &inst.examples)};
    const bool ok = log.reasons.empty();
    v.record.attempts.push_back(std::move(log));
    if (ok) {
      inst.id = source.id;
      inst.timestamp = source.timestamp;
      inst.violation_id = source.violation_id;
      inst.nominal_id = source.nominal_id;
      v.instance = std::move(inst);
      v.record.accepted = true;
      break;
    }
  }
  return v;
}

// ---- Level 2 ------------------------------------------------------------

Level2Result check_subsets(const std::vector<SubsetInstance>& subsets, const BiasSpec& bias,
                           const PipelineConfig& config, const Solver& solver) {
  const BiasSpec eb = config.effective_bias(bias);
  Level2Result out;
  out.checks.resize(subsets.size());
  for_each_index(subsets.size(), config.parallel, [&](std::size_t i) {
    const SubsetInstance& s = subsets[i];
    SolverResult r = run_solver(solver, s.background, s.examples, eb, config);
    SubsetCheck& c = out.checks[i];
    c.id = s.id;
    c.outcome = r.outcome;
    c.stats = r.stats;
    c.reliable = r.found() && !r.hypothesis.empty();
    c.hypothesis = std::move(r.hypothesis);
  });
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    if (out.checks[i].reliable) out.reliable.push_back(subsets[i]);
  }
  return out;
}

// ---- Level 3 ------------------------------------------------------------

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::accepted: return "accepted";
    case Decision::retained_partial: return "retained_partial";
    case Decision::discarded: return "discarded";
  }
  return "discarded";
}

namespace {

struct Attempt {
  bool passed = false;
  bool solved = false;
  Program background;
  ExampleSet examples;
  Program hypothesis;
  std::string reason;
};

Attempt try_union(const AggregationState& state, const Program& bg, const ExampleSet& exs, const BiasSpec& bias,
                  const PipelineConfig& config, const Solver& solver) {
  Attempt a;
  auto merged = ExampleSet::try_unite(state.examples, exs);
  if (!merged) {
    a.reason = "label conflict with accepted examples";
    return a;
  }
  a.background = Program::unite(state.background, bg);
  a.examples = std::move(*merged);
  SolverResult r = run_solver(solver, a.background, a.examples, bias, config);
  a.solved = true;
  if (r.outcome == SolveOutcome::timeout) {
    a.reason = "solver timeout";
  } else if (!r.found()) {
    a.reason = "no training-correct hypothesis";
  } else if (r.hypothesis.empty()) {
    a.reason = "empty hypothesis";
  } else {
    a.passed = true;
    a.hypothesis = std::move(r.hypothesis);
  }
  return a;
}

void assert_training_correct(const AggregationState& s) {
  if (!verify(s.background, s.hypothesis, s.examples).consistent()) {
    throw std::logic_error("aggregated hypothesis is not training-correct after accepting a candidate");
  }
}

}  // namespace

RetainResult retain_partial(const AggregationState& state, const SubsetInstance& candidate, const BiasSpec& bias,
                            const PipelineConfig& config, const Solver& solver) {
  RetainResult out;
  std::vector<RemovedExample> order;
  const auto& negs = candidate.examples.negatives();
  const auto& poss = candidate.examples.positives();
  for (auto it = negs.rbegin(); it != negs.rend(); ++it) order.push_back({*it, false});
  for (auto it = poss.rbegin(); it != poss.rend(); ++it) order.push_back({*it, true});

  ExampleSet reduced = candidate.examples;
  std::size_t positives_left = poss.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    reduced.remove(order[i].atom);
    if (order[i].positive) --positives_left;
    if (positives_left == 0) break;
    Attempt a = try_union(state, candidate.background, reduced, bias, config, solver);
    if (a.solved) ++out.solver_calls;
    if (a.passed) {
      out.removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i + 1));
      SubsetInstance r = candidate;
      r.examples = reduced;
      out.reduced = std::move(r);
      out.hypothesis = std::move(a.hypothesis);
      return out;
    }
  }
  return out;
}

AggregationState run_trial(const std::vector<const SubsetInstance*>& order, const BiasSpec& bias,
                           const PipelineConfig& config, const Solver& solver, const StepObserver& observer) {
  const BiasSpec eb = config.effective_bias(bias);
  AggregationState state;
  for (const SubsetInstance* cand : order) {
    CandidateDecision d;
    d.id = cand->id;
    Attempt a = try_union(state, cand->background, cand->examples, eb, config, solver);
    if (a.solved) ++d.solver_calls;
    if (a.passed) {
      d.decision = Decision::accepted;
      state.background = std::move(a.background);
      state.examples = std::move(a.examples);
      state.hypothesis = std::move(a.hypothesis);
    } else {
      d.reason = a.reason;
      RetainResult r = retain_partial(state, *cand, eb, config, solver);
      d.solver_calls += r.solver_calls;
      if (r.reduced) {
        d.decision = Decision::retained_partial;
        d.removed = std::move(r.removed);
        state.background = Program::unite(state.background, r.reduced->background);
        state.examples = *ExampleSet::try_unite(state.examples, r.reduced->examples);
        state.hypothesis = std::move(r.hypothesis);
      }
    }
    const bool grew = d.decision != Decision::discarded;
    if (grew) state.accepted.push_back(cand->id);
    state.trial_log.push_back(std::move(d));
    if (grew) {
      assert_training_correct(state);
      if (observer) observer(state);
    }
  }
  return state;
}

std::vector<std::size_t> trial_order(const std::vector<SubsetInstance>& reliable, int trial, std::uint64_t seed) {
  std::vector<std::size_t> idx(reliable.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (reliable[a].timestamp != reliable[b].timestamp) return reliable[a].timestamp < reliable[b].timestamp;
    return reliable[a].id < reliable[b].id;
  });
  if (trial > 1) detail::Rng(seed, static_cast<std::uint64_t>(trial)).shuffle(idx);
  return idx;
}

AggregateResult aggregate(const std::vector<SubsetInstance>& reliable, const BiasSpec& bias,
                          const PipelineConfig& config, const Solver& solver, const StepObserver& observer) {
  AggregateResult out;
  if (reliable.empty()) return out;
  const double total = static_cast<double>(reliable.size());
  for (int t = 1; t <= config.max_retries; ++t) {
    TrialRecord rec;
    rec.trial = t;
    std::vector<const SubsetInstance*> order;
    for (std::size_t i : trial_order(reliable, t, config.seed)) {
      order.push_back(&reliable[i]);
      rec.order.push_back(reliable[i].id);
    }
    rec.state = run_trial(order, bias, config, solver, observer);
    rec.k = rec.state.accepted.size();
    rec.fail_frac = 1.0 - static_cast<double>(rec.k) / total;
    rec.success = rec.k > 0 && rec.fail_frac <= config.rho;
    const bool stop = rec.fail_frac <= config.rho;
    out.trials.push_back(std::move(rec));
    const TrialRecord& cur = out.trials.back();
    const TrialRecord& best = out.trials[static_cast<std::size_t>(out.best_trial)];
    if (std::pair(cur.success, cur.k) > std::pair(best.success, best.k)) {
      out.best_trial = static_cast<int>(out.trials.size() - 1);
    }
    if (stop) {
      out.early_stopped = t < config.max_retries;
      break;
    }
  }
  return out;
}

// ---- Level 4 ------------------------------------------------------------

PruneResult prune_by_support(const Program& h, const Program& b, const std::vector<Atom>& pos, double tau) {
  PruneResult out;
  if (h.empty()) return out;
  const FactStore store(b);
  for (const auto& r : h) {
    const std::size_t s = rule_support(r, store, pos);
    out.rules.push_back({r, s, false});
    out.max_support = std::max(out.max_support, s);
  }
  out.threshold = tau * static_cast<double>(out.max_support);
  for (auto& r : out.rules) {
    r.kept = static_cast<double>(r.support) + 1e-9 >= out.threshold;
    if (r.kept) out.kept.add(r.rule);
  }
  return out;
}

// ---- Composition ----------------------------------------------------------

PipelineReport run_pipeline(const std::vector<SubsetSource>& sources, const BiasSpec& bias,
                            const PipelineConfig& config, const Solver& solver, const StepObserver& observer) {
  config.check();
  config.effective_bias(bias).check();
  PipelineReport rep;

  std::vector<Validation> validations(sources.size());
  for_each_index(sources.size(), config.parallel, [&](std::size_t i) {
    validations[i] = validate_bundle(sources[i], bias, config.validation_attempts);
  });
  std::vector<SubsetInstance> valid;
  for (auto& v : validations) {
    rep.level1.push_back(std::move(v.record));
    if (v.instance) valid.push_back(std::move(*v.instance));
  }
  if (valid.empty()) {
    rep.emptied_at = "level1";
    return rep;
  }

  Level2Result l2 = check_subsets(valid, bias, config, solver);
  rep.level2 = std::move(l2.checks);
  if (l2.reliable.empty()) {
    rep.emptied_at = "level2";
    return rep;
  }

  rep.level3 = aggregate(l2.reliable, bias, config, solver, observer);
  const TrialRecord* best = rep.level3.best();
  if (!best || best->state.hypothesis.empty()) {
    rep.emptied_at = "level3";
    return rep;
  }
  rep.level4 = prune_by_support(best->state.hypothesis, best->state.background, best->state.examples.positives(),
                                config.tau);
  rep.final_hypothesis = rep.level4.kept;
  return rep;
}

}  // namespace rulesmith::pipeline
