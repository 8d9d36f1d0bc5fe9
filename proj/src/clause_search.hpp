#pragma once

// Compact clause representation and the refinement operator used by both
// the clause stream and the pruned learner.

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "canonical_core.hpp"
#include "rulesmith/logic.hpp"

namespace rulesmith::detail {

struct KeyHash {
  std::size_t operator()(const std::vector<int>& k) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int v : k) h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ULL;
    return h;
  }
};

struct SearchDecl {
  std::string name;
  std::size_t arity = 0;
  std::vector<int> types;  // per argument; -1 when untyped
};

/// Bias with predicates ranked by (name, arity). Body declarations never
/// include head predicates.
struct SearchBias {
  explicit SearchBias(const BiasSpec& bias);

  std::vector<SearchDecl> heads;
  std::vector<SearchDecl> bodies;
  std::vector<std::string> type_names;
  std::size_t max_vars = 0;
  std::size_t max_body = 0;
};

/// Clause with head `heads[head](V0..Vk-1)` and an integer-coded body, kept
/// in canonical order and naming.
struct Node {
  int head = 0;
  std::vector<CoreLiteral> body;
  int num_vars = 0;
  std::vector<int> var_types;

  bool range_restricted(const SearchBias& bias) const;
  std::vector<int> key() const;
};

/// Order of the clause stream: body length, head, then body literals.
bool node_less(const Node& a, const Node& b);

std::vector<Node> root_nodes(const SearchBias& bias);

/// One-literal extensions of `node` that stay connected, typed and within
/// bounds, each in canonical form. May contain duplicates.
std::vector<Node> refinements(const Node& node, const SearchBias& bias);

/// Refines every node of `level`, dropping duplicates (first occurrence
/// wins). parents[i] is the index in `level` that produced result i.
std::vector<Node> next_level(const std::vector<Node>& level, const SearchBias& bias,
                             std::vector<std::size_t>* parents = nullptr);

Clause to_clause(const Node& node, const SearchBias& bias);

/// Memoised refinement operator for one bias. Nodes get stable ids; the
/// children of a node are computed once and shared across solver calls.
/// Thread-safe.
class RefinementGraph {
 public:
  explicit RefinementGraph(SearchBias bias);

  const SearchBias& bias() const noexcept { return bias_; }
  std::vector<std::uint32_t> roots() const { return roots_; }
  Node node(std::uint32_t id) const;
  /// Same contract as next_level, over ids.
  std::vector<std::uint32_t> next_level(const std::vector<std::uint32_t>& level, std::vector<std::size_t>* parents);

 private:
  std::uint32_t intern(Node n);  // caller holds mu_

  SearchBias bias_;
  mutable std::mutex mu_;
  std::deque<Node> nodes_;
  std::deque<std::optional<std::vector<std::uint32_t>>> children_;
  std::unordered_map<std::vector<int>, std::uint32_t, KeyHash> ids_;
  std::vector<std::uint32_t> roots_;
};

/// Process-wide graph for `bias`, keyed by its content.
std::shared_ptr<RefinementGraph> refinement_graph(const SearchBias& bias);

}  // namespace rulesmith::detail
