#pragma once

// Integer-encoded canonicalization shared by the logic layer and the
// learner's refinement search.

#include <cstddef>
#include <span>
#include <vector>

namespace rulesmith::detail {

// Encoded arguments: variables are ids in [0, kConstantBase); constants are
// kConstantBase + rank, where rank follows constant-name order.
inline constexpr int kConstantBase = 1 << 24;

struct CoreLiteral {
  int pred = 0;  // rank in (name, arity) order
  std::vector<int> args;

  friend bool operator==(const CoreLiteral&, const CoreLiteral&) = default;
  friend auto operator<=>(const CoreLiteral&, const CoreLiteral&) = default;
};

struct CanonicalForm {
  std::vector<std::size_t> order;  // order[i] = index of the i-th canonical literal
  std::vector<int> renaming;       // renaming[old var] = canonical var, -1 if unused
  std::vector<CoreLiteral> body;   // renamed, in canonical order
  std::vector<int> head;           // renamed head args
};

CanonicalForm canonical_form(std::span<const int> head_args, std::span<const CoreLiteral> body,
                             int num_vars);

}  // namespace rulesmith::detail
