#pragma once

// Backtracking conjunctive-query kernel shared by bottom-up evaluation and
// the learner's top-down coverage test.

#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rulesmith/entailment.hpp"

namespace rulesmith::detail {

inline constexpr std::uint32_t kUnbound = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::size_t kMaxArity = 16;
inline constexpr std::size_t kMaxBody = 64;

struct JoinTerm {
  bool variable = false;
  std::uint32_t value = 0;  // variable index or constant id
};

struct JoinLiteral {
  const Relation* relation = nullptr;  // nullptr: no matching facts exist
  std::vector<JoinTerm> args;
};

/// Compiled clause over a FactStore's symbol ids.
struct CompiledRule {
  std::uint32_t head_pred = 0;
  std::vector<JoinTerm> head;
  std::vector<std::uint32_t> body_preds;  // store predicate ids (valid only when resolved)
  std::vector<JoinLiteral> body;
  std::size_t num_vars = 0;
};

class Joiner {
 public:
  explicit Joiner(std::span<const JoinLiteral> lits) : lits_(lits) {}

  /// Calls visit(binding) for every extension of `binding` satisfying all
  /// literals. visit returns false to stop. Returns false iff stopped.
  template <class Visit>
  bool run(std::vector<std::uint32_t>& binding, Visit&& visit) {
    return step(binding, 0, 0, visit);
  }

 private:
  // Estimated candidate rows for literal i under `binding`.
  std::size_t estimate(std::size_t i, const std::vector<std::uint32_t>& binding, int& column,
                       std::uint32_t& value) const {
    const JoinLiteral& lit = lits_[i];
    column = -1;
    if (!lit.relation) return 0;
    std::size_t best = lit.relation->size();
    for (std::size_t c = 0; c < lit.args.size(); ++c) {
      const JoinTerm& t = lit.args[c];
      std::uint32_t v = t.variable ? binding[t.value] : t.value;
      if (v == kUnbound) continue;
      const std::size_t n = lit.relation->rows_with(c, v).size();
      if (column < 0 || n < best) {
        best = n;
        column = static_cast<int>(c);
        value = v;
      }
    }
    return best;
  }

  template <class Visit>
  bool step(std::vector<std::uint32_t>& binding, std::uint64_t used, std::size_t depth, Visit& visit) {
    const std::size_t n = lits_.size();
    if (depth == n) return visit(binding);
    std::size_t pick = n;
    std::size_t best = 0;
    int column = -1;
    std::uint32_t value = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used & (std::uint64_t{1} << i)) continue;
      int c;
      std::uint32_t v = 0;
      const std::size_t e = estimate(i, binding, c, v);
      if (pick == n || e < best) {
        pick = i;
        best = e;
        column = c;
        value = v;
      }
      if (e == 0) break;
    }
    if (best == 0) return true;
    const JoinLiteral& lit = lits_[pick];
    const Relation& rel = *lit.relation;
    const std::uint64_t next_used = used | (std::uint64_t{1} << pick);
    std::uint32_t bound_here[kMaxArity];
    auto try_row = [&](std::span<const std::uint32_t> row) {
      std::size_t nb = 0;
      bool ok = true;
      for (std::size_t c = 0; c < lit.args.size() && ok; ++c) {
        const JoinTerm& t = lit.args[c];
        if (!t.variable) {
          ok = row[c] == t.value;
        } else if (binding[t.value] == kUnbound) {
          binding[t.value] = row[c];
          bound_here[nb++] = t.value;
        } else {
          ok = binding[t.value] == row[c];
        }
      }
      bool keep_going = true;
      if (ok) keep_going = step(binding, next_used, depth + 1, visit);
      for (std::size_t k = 0; k < nb; ++k) binding[bound_here[k]] = kUnbound;
      return keep_going;
    };
    if (column >= 0) {
      for (std::uint32_t r : rel.rows_with(static_cast<std::size_t>(column), value)) {
        if (!try_row(rel.row(r))) return false;
      }
    } else {
      for (std::size_t r = 0; r < rel.size(); ++r) {
        if (!try_row(rel.row(r))) return false;
      }
    }
    return true;
  }

  std::span<const JoinLiteral> lits_;
};

}  // namespace rulesmith::detail
