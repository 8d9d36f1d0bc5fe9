#pragma once

// Synthetic corpora planted from known rules, standing in for extracted
// reports. The planted rules are the labelling oracle: an agent pair is
// positive exactly when the rules derive it from the scene's facts.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rulesmith/eval.hpp"
#include "rulesmith/ingest.hpp"
#include "rulesmith/logic.hpp"

namespace rulesmith::synth {

/// unknown_predicate: the violation side uses a predicate outside the
///   vocabulary (Level 1 rejects every attempt).
/// fact_deletion: one planted fact is missing and the nominal side holds an
///   isomorphic safe copy of the damaged scene (Level 2 discards).
/// label_flip: the nominal side contains a planted configuration labelled
///   negative (conflicts surface during aggregation).
enum class Corruption { none, unknown_predicate, fact_deletion, label_flip };

std::string_view to_string(Corruption c);
std::optional<Corruption> corruption_from_string(std::string_view s);

struct Scene {
  Program background;
  ExampleSet examples;
  std::vector<std::string> agents;
};

class SceneGenerator {
 public:
  /// Rules must be range-restricted with heads and bodies declared in
  /// `bias`. Throws InvariantError otherwise.
  SceneGenerator(Program rules, BiasSpec bias, std::uint64_t seed);

  std::size_t rule_count() const noexcept { return rules_.size(); }
  const Program& rules() const noexcept { return rules_; }

  /// Planted instance of rule `rule`; positives are every derived head atom.
  Scene violation(const std::string& prefix, std::size_t rule);
  /// Routine snapshot holding one near miss of each rule (a join broken, a
  /// literal swapped or a literal dropped) that no planted rule fires on.
  /// Every ordered pair of distinct agents is a negative.
  Scene nominal(const std::string& prefix);
  /// Violation scene plus negatives for every other agent pair.
  Scene held_out_violation(const std::string& prefix, std::size_t rule);

  /// Planted instance with one body fact removed, the intended pair still
  /// labelled positive, and an isomorphic safe twin under `twin_prefix`.
  std::pair<Scene, Scene> damaged_violation(const std::string& prefix, const std::string& twin_prefix,
                                            std::size_t rule);
  /// Planted instance whose derived pairs are labelled negative.
  Scene flipped(const std::string& prefix, std::size_t rule);

 private:
  struct Instance;
  Instance instantiate(const std::string& prefix, const Clause& rule);
  std::optional<Instance> near_miss(const std::string& prefix, std::size_t rule);
  void add_distractors(Instance& inst);
  void close_relations(Program& facts) const;
  std::vector<Atom> derived(const Program& facts) const;
  std::vector<Atom> agent_pairs(const std::vector<std::string>& agents) const;
  std::string type_of(const std::string& pred, std::size_t pos) const;

  Program rules_;
  BiasSpec bias_;
  std::string head_pred_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
};

struct GenConfig {
  Program rules;
  BiasSpec bias;
  std::size_t subsets = 30;
  double corruption = 0.0;  // fraction of subsets, rounded to nearest
  std::uint64_t seed = 0;
};

struct PlannedSubset {
  std::string id;
  ingest::RecordPair records;  // payloads hold each side's bundle text
  std::size_t planted_rule = 0;
  Corruption corruption = Corruption::none;
  std::string background_text;
  std::string examples_text;
};

struct Corpus {
  std::vector<PlannedSubset> subsets;
};

/// Deterministic in the config. Violations cycle through the rules in a
/// seeded order; exactly round(corruption * subsets) subsets are corrupted.
Corpus generate_corpus(const GenConfig& config);

/// Held-out scenarios: alternating violation and nominal scenes.
std::vector<eval::Scenario> generate_scenarios(const Program& rules, const BiasSpec& bias, std::size_t count,
                                               std::uint64_t seed);

}  // namespace rulesmith::synth
