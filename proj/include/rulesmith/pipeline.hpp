#pragma once

// Four-level feedback pipeline: bundle validation with retries, per-subset
// consistency checks, order-sensitive global aggregation with shuffle
// fallback and partial retention, and support pruning.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rulesmith/ingest.hpp"
#include "rulesmith/learner.hpp"
#include "rulesmith/logic.hpp"

namespace rulesmith::pipeline {

struct PipelineConfig {
  double rho = 0.30;
  double tau = 0.20;
  int max_retries = 5;  // trials T
  int validation_attempts = 3;
  std::uint64_t seed = 0;
  std::chrono::milliseconds timeout{10'000};
  std::optional<std::size_t> max_vars;
  std::optional<std::size_t> max_body;
  std::optional<std::size_t> max_clauses;
  bool parallel = true;

  /// Throws InvariantError when a field is out of range.
  void check() const;
  /// `bias` with any bound overrides applied.
  BiasSpec effective_bias(const BiasSpec& bias) const;
};

/// One candidate bundle as it arrives from extraction. `attempt(n)` is the
/// regenerate hook, called with n = 1, 2, ... until validation passes.
struct SubsetSource {
  std::string id;
  ingest::Timestamp timestamp{};
  std::string violation_id;
  std::string nominal_id;
  std::function<ingest::RawBundle(int)> attempt;
};

struct SubsetInstance {
  std::string id;
  ingest::Timestamp timestamp{};
  std::string violation_id;
  std::string nominal_id;
  Program background;
  ExampleSet examples;
};

// ---- Level 1 ------------------------------------------------------------

struct AttemptLog {
  int attempt = 0;
  std::vector<std::string> reasons;  // empty when the attempt was valid
};

struct ValidationRecord {
  std::string id;
  bool accepted = false;
  std::vector<AttemptLog> attempts;

  /// Distinct reasons over all attempts, first-seen order.
  std::vector<std::string> reasons() const;
};

struct Validation {
  std::optional<SubsetInstance> instance;
  ValidationRecord record;
};

/// Problems with one candidate bundle, empty when it is valid. On success
/// the parsed program and examples are stored in `background`/`examples`.
std::vector<std::string> bundle_problems(const ingest::RawBundle& raw, const BiasSpec& bias, Program* background,
                                         ExampleSet* examples);

/// Tries up to `attempts` bundles from `source`. I/O failures propagate as
/// ingest::IoError.
Validation validate_bundle(const SubsetSource& source, const BiasSpec& bias, int attempts);

// ---- Level 2 ------------------------------------------------------------

struct SubsetCheck {
  std::string id;
  SolveOutcome outcome = SolveOutcome::no_hypothesis;
  SolverStats stats;
  Program hypothesis;
  bool reliable = false;
};

struct Level2Result {
  std::vector<SubsetInstance> reliable;  // input order
  std::vector<SubsetCheck> checks;       // input order
};

Level2Result check_subsets(const std::vector<SubsetInstance>& subsets, const BiasSpec& bias,
                           const PipelineConfig& config, const Solver& solver);

// ---- Level 3 ------------------------------------------------------------

enum class Decision { accepted, retained_partial, discarded };

std::string_view to_string(Decision d);

struct RemovedExample {
  Atom atom;
  bool positive = false;
};

struct CandidateDecision {
  std::string id;
  Decision decision = Decision::discarded;
  std::vector<RemovedExample> removed;
  std::size_t solver_calls = 0;
  std::string reason;  // why the full candidate failed, if it did
};

struct AggregationState {
  std::vector<std::string> accepted;
  Program background;
  ExampleSet examples;
  Program hypothesis;
  std::vector<CandidateDecision> trial_log;
};

struct RetainResult {
  std::optional<SubsetInstance> reduced;
  std::vector<RemovedExample> removed;  // in removal order
  Program hypothesis;                   // for the union with `reduced`
  std::size_t solver_calls = 0;
};

/// Removes the candidate's examples one at a time (negatives, then
/// positives, each most recent first) until the union with `state` has a
/// non-empty training-correct hypothesis while keeping at least one of the
/// candidate's positives. Call only after the full candidate failed.
RetainResult retain_partial(const AggregationState& state, const SubsetInstance& candidate, const BiasSpec& bias,
                            const PipelineConfig& config, const Solver& solver);

/// Called after every accepted or retained candidate with the new state.
using StepObserver = std::function<void(const AggregationState&)>;

/// One pass of the aggregation loop over `order`.
AggregationState run_trial(const std::vector<const SubsetInstance*>& order, const BiasSpec& bias,
                           const PipelineConfig& config, const Solver& solver, const StepObserver& observer = {});

/// Candidate order for trial t (1-based): chronological for t = 1, a
/// shuffle seeded by (seed, t) of the chronological order afterwards.
std::vector<std::size_t> trial_order(const std::vector<SubsetInstance>& reliable, int trial, std::uint64_t seed);

struct TrialRecord {
  int trial = 0;
  std::vector<std::string> order;
  std::size_t k = 0;
  double fail_frac = 1.0;
  bool success = false;  // k > 0 and fail_frac <= rho
  AggregationState state;
};

struct AggregateResult {
  std::vector<TrialRecord> trials;
  int best_trial = 0;  // index into trials; meaningless when trials is empty
  bool early_stopped = false;

  const TrialRecord* best() const { return trials.empty() ? nullptr : &trials[static_cast<std::size_t>(best_trial)]; }
};

/// Trials run in order; the best is the first with the greatest
/// (success, k). Stops after the first trial with fail_frac <= rho.
AggregateResult aggregate(const std::vector<SubsetInstance>& reliable, const BiasSpec& bias,
                          const PipelineConfig& config, const Solver& solver, const StepObserver& observer = {});

// ---- Level 4 ------------------------------------------------------------

struct RuleSupport {
  Clause rule;
  std::size_t support = 0;
  bool kept = false;
};

struct PruneResult {
  Program kept;
  std::vector<RuleSupport> rules;  // hypothesis order
  std::size_t max_support = 0;
  double threshold = 0.0;  // tau * max_support
};

/// Keeps rules with supp(r) >= tau * max supp, each support measured with
/// the rule alone against (b, pos).
PruneResult prune_by_support(const Program& h, const Program& b, const std::vector<Atom>& pos, double tau);

// ---- Composition ----------------------------------------------------------

struct PipelineReport {
  std::vector<ValidationRecord> level1;
  std::vector<SubsetCheck> level2;
  AggregateResult level3;
  PruneResult level4;
  Program final_hypothesis;
  /// Empty when every level carried something forward, otherwise the
  /// first level that left nothing ("level1", "level2" or "level3").
  std::string emptied_at;
};

/// `observer` is forwarded to every aggregation trial.
PipelineReport run_pipeline(const std::vector<SubsetSource>& sources, const BiasSpec& bias,
                            const PipelineConfig& config, const Solver& solver, const StepObserver& observer = {});

}  // namespace rulesmith::pipeline
