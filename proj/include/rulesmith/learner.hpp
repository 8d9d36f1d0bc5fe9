#pragma once

// Solver contract ("find H consistent with (B, E+, E-) under a bias") and the
// reference generate-and-test learner behind it.

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rulesmith/logic.hpp"

namespace rulesmith {

struct SolverRequest {
  Program background;
  ExampleSet examples;
  BiasSpec bias;
  std::chrono::milliseconds timeout{10'000};
  std::uint64_t seed = 0;
};

enum class SolveOutcome { hypothesis, no_hypothesis, timeout };

std::string_view to_string(SolveOutcome o);

struct SolverStats {
  std::size_t clauses_enumerated = 0;
  std::size_t candidates_negative_safe = 0;
  std::chrono::nanoseconds elapsed{0};
};

struct SolverResult {
  SolveOutcome outcome = SolveOutcome::no_hypothesis;
  Program hypothesis;
  SolverStats stats;

  bool found() const noexcept { return outcome == SolveOutcome::hypothesis; }
};

/// Anything that can act as the ILP engine. Implementations must only return
/// outcome=hypothesis for programs that cover every positive and no negative
/// of the request (checked against the request's own background).
class Solver {
 public:
  virtual ~Solver() = default;
  virtual std::string name() const = 0;
  virtual SolverResult solve(const SolverRequest& request) const = 0;
};

/// How the reference learner walks the clause space.
///  - exhaustive: every clause of the bias stream, coverage by bottom-up
///    derivation, evaluated serially. Kept as the reference for tests.
///  - pruned: top-down refinement that stops below clauses covering no
///    positive and below negative-safe clauses (their specialisations can
///    never win the cover), with each refinement level evaluated in parallel.
/// Both produce the same hypothesis; only the stats differ.
enum class SearchMode { pruned, exhaustive };

struct SearchOptions {
  SearchMode mode = SearchMode::pruned;
  bool parallel = true;
};

/// Runs the reference algorithm: negative-safe candidates covering at least
/// one positive, then greedy cover by (uncovered count desc, body length asc,
/// canonical order asc), bounded by max_clauses.
/// Throws InvariantError if the bias is invalid.
SolverResult solve(const SolverRequest& request, SearchOptions options = {});

class ReferenceSolver final : public Solver {
 public:
  explicit ReferenceSolver(SearchOptions options = {}) : options_(options) {}
  std::string name() const override;
  SolverResult solve(const SolverRequest& request) const override;

 private:
  SearchOptions options_;
};

/// Every canonical, range-restricted, connected, type-consistent clause of
/// the bias, ordered by (body length, canonical form). Head predicates never
/// occur in bodies.
std::vector<Clause> enumerate_clauses(const BiasSpec& bias);

/// Streaming form of enumerate_clauses; stops when `visit` returns false.
void for_each_clause(const BiasSpec& bias, const std::function<bool(const Clause&)>& visit);

struct Verification {
  enum class Status { consistent, incomplete, unsound };
  Status status = Status::consistent;
  std::vector<Atom> missed;       // positives not entailed
  std::vector<Atom> covered_neg;  // negatives entailed

  bool consistent() const noexcept { return status == Status::consistent; }
};

/// Checks b ∪ h against the examples. An unsound hypothesis reports
/// `unsound` even when it also misses positives.
Verification verify(const Program& b, const Program& h, const ExampleSet& exs);

}  // namespace rulesmith
