#pragma once

// Held-out evaluation by entailment and the usual confusion-matrix metrics.

#include <string>
#include <vector>

#include "rulesmith/logic.hpp"

namespace rulesmith::eval {

struct Scenario {
  std::string id;
  Program background;
  ExampleSet examples;
  std::vector<std::string> tags;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  Confusion& operator+=(const Confusion& o);
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Precision, recall and accuracy are 1.0 when their denominator is zero,
/// with the matching flag set. F1 is 0 when precision + recall is 0.
struct Metrics {
  double accuracy = 1.0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  bool accuracy_degenerate = false;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
};

Metrics metrics_from(const Confusion& c);

struct Verdict {
  std::string scenario;
  Atom example;
  bool label = false;      // true for a positive example
  bool predicted = false;  // background ∪ h entails the example
};

struct ScenarioResult {
  std::string id;
  Confusion counts;
  bool correct = false;  // no false negative and no false positive
};

struct EvalReport {
  std::vector<Verdict> verdicts;  // scenario order, positives before negatives
  std::vector<ScenarioResult> scenarios;
  Confusion counts;  // pooled over every example
  Metrics metrics;
};

/// Scenarios are evaluated independently (in parallel when asked); the
/// report does not depend on that choice.
EvalReport evaluate(const Program& h, const std::vector<Scenario>& scenarios, bool parallel = true);

struct VerdictChange {
  std::string scenario;
  Atom example;
  bool label = false;
  bool before = false;
  bool after = false;
};

struct HypothesisDiff {
  std::vector<VerdictChange> disagreements;
  Confusion before;
  Confusion after;
  Metrics before_metrics;
  Metrics after_metrics;

  bool empty() const noexcept { return disagreements.empty(); }
  long delta_tp() const { return static_cast<long>(after.tp) - static_cast<long>(before.tp); }
  long delta_fp() const { return static_cast<long>(after.fp) - static_cast<long>(before.fp); }
  long delta_fn() const { return static_cast<long>(after.fn) - static_cast<long>(before.fn); }
  long delta_tn() const { return static_cast<long>(after.tn) - static_cast<long>(before.tn); }
};

HypothesisDiff diff_hypotheses(const Program& h1, const Program& h2, const std::vector<Scenario>& scenarios);

}  // namespace rulesmith::eval
