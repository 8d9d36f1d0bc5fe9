#include "rulesmith/eval.hpp"

#include "rulesmith/entailment.hpp"

namespace rulesmith::eval {

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

Metrics metrics_from(const Confusion& c) {
  Metrics m;
  const auto ratio = [](std::size_t num, std::size_t den, bool& degenerate) {
    degenerate = den == 0;
    return degenerate ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn, m.accuracy_degenerate);
  m.precision = ratio(c.tp, c.tp + c.fp, m.precision_degenerate);
  m.recall = ratio(c.tp, c.tp + c.fn, m.recall_degenerate);
  const double s = m.precision + m.recall;
  m.f1 = s == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / s;
  return m;
}

namespace {

struct Local {
  std::vector<Verdict> verdicts;
  ScenarioResult result;
};

Local run_one(const Program& h, const Scenario& s) {
  Local out;
  out.result.id = s.id;
  const FactStore model = consequences(s.background, h);
  auto record = [&](const Atom& e, bool label) {
    const bool predicted = model.contains(e);
    out.verdicts.push_back({s.id, e, label, predicted});
    Confusion& c = out.result.counts;
    (label ? (predicted ? c.tp : c.fn) : (predicted ? c.fp : c.tn)) += 1;
  };
  for (const auto& e : s.examples.positives()) record(e, true);
  for (const auto& e : s.examples.negatives()) record(e, false);
  out.result.correct = out.result.counts.fn == 0 && out.result.counts.fp == 0;
  return out;
}

}  // namespace

EvalReport evaluate(const Program& h, const std::vector<Scenario>& scenarios, bool parallel) {
  std::vector<Local> parts(scenarios.size());
  const auto n = static_cast<std::ptrdiff_t>(scenarios.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    parts[static_cast<std::size_t>(i)] = run_one(h, scenarios[static_cast<std::size_t>(i)]);
  }
  EvalReport r;
  for (auto& p : parts) {
    r.counts += p.result.counts;
    r.scenarios.push_back(std::move(p.result));
    r.verdicts.insert(r.verdicts.end(), std::make_move_iterator(p.verdicts.begin()),
                      std::make_move_iterator(p.verdicts.end()));
  }
  r.metrics = metrics_from(r.counts);
  return r;
}

HypothesisDiff diff_hypotheses(const Program& h1, const Program& h2, const std::vector<Scenario>& scenarios) {
  const EvalReport a = evaluate(h1, scenarios);
  const EvalReport b = evaluate(h2, scenarios);
  HypothesisDiff d;
  d.before = a.counts;
  d.after = b.counts;
  d.before_metrics = a.metrics;
  d.after_metrics = b.metrics;
  for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
    if (a.verdicts[i].predicted != b.verdicts[i].predicted) {
      d.disagreements.push_back({a.verdicts[i].scenario, a.verdicts[i].example, a.verdicts[i].label,
                                 a.verdicts[i].predicted, b.verdicts[i].predicted});
    }
  }
  return d;
}

}  // namespace rulesmith::eval
