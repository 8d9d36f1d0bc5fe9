#pragma once

// Bottom-up entailment over function-free definite programs: least Herbrand
// model by semi-naive evaluation, example coverage and rule support.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rulesmith/logic.hpp"

namespace rulesmith {

/// Set of equal-arity integer tuples with a hash index on every column.
class Relation {
 public:
  explicit Relation(std::size_t arity = 0);

  /// Returns false if the row was already present.
  bool insert(std::span<const std::uint32_t> row);
  bool contains(std::span<const std::uint32_t> row) const;

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::span<const std::uint32_t> row(std::size_t i) const {
    return {data_.data() + i * arity_, arity_};
  }
  /// Row indices whose `column` equals `value`.
  std::span<const std::uint32_t> rows_with(std::size_t column, std::uint32_t value) const;

 private:
  std::uint64_t hash(std::span<const std::uint32_t> row) const;

  std::size_t arity_;
  std::size_t count_ = 0;
  std::vector<std::uint32_t> data_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
  std::vector<std::vector<std::vector<std::uint32_t>>> columns_;  // [column][constant id]
};

/// Ground atoms indexed per predicate. Symbols are interned; insertion is
/// idempotent and membership is exact.
class FactStore {
 public:
  FactStore() = default;
  /// Throws InvariantError if `facts` contains a rule or a non-ground atom.
  explicit FactStore(const Program& facts);

  bool insert(const Atom& ground);
  bool contains(const Atom& ground) const;
  std::size_t size() const noexcept { return size_; }
  /// All atoms, sorted.
  std::vector<Atom> atoms() const;

  /// Constants seen so far, including those registered via add_universe.
  std::vector<std::string> universe() const;
  void add_universe(const ExampleSet& examples);

  std::optional<std::uint32_t> constant_id(std::string_view name) const;
  std::uint32_t intern_constant(std::string_view name);
  const std::string& constant_name(std::uint32_t id) const { return constants_[id]; }
  std::size_t constant_count() const noexcept { return constants_.size(); }

  std::optional<std::uint32_t> predicate_id(std::string_view name, std::size_t arity) const;
  std::uint32_t intern_predicate(std::string_view name, std::size_t arity);
  std::size_t predicate_count() const noexcept { return predicates_.size(); }
  const std::string& predicate_name(std::uint32_t id) const { return predicates_[id].first; }

  const Relation& relation(std::uint32_t pred) const { return relations_[pred]; }
  bool insert_row(std::uint32_t pred, std::span<const std::uint32_t> row);

 private:
  std::vector<std::string> constants_;
  std::unordered_map<std::string, std::uint32_t> constant_ids_;
  std::vector<std::pair<std::string, std::size_t>> predicates_;
  std::map<std::pair<std::string, std::size_t>, std::uint32_t, std::less<>> predicate_ids_;
  std::vector<Relation> relations_;
  std::size_t size_ = 0;
};

/// Least Herbrand model of b ∪ h. `b` must be ground facts; rules in `h`
/// must be range-restricted. Facts inside `h` are accepted as well.
FactStore consequences(const Program& b, const Program& h);

/// Throws InvariantError when `e` is not ground.
bool entails(const Program& b, const Program& h, const Atom& e);

struct Coverage {
  std::vector<Atom> covered_pos;
  std::vector<Atom> covered_neg;
};

/// Examples entailed by b ∪ h, from a single model computation.
Coverage coverage(const Program& b, const Program& h, const ExampleSet& exs);

/// Head instances produced by one application of `r` to `store`.
/// `r` must be range-restricted.
std::vector<Atom> derive_once(const FactStore& store, const Clause& r);

/// Number of `pos` atoms entailed by b ∪ {r}.
std::size_t rule_support(const Clause& r, const Program& b, std::span<const Atom> pos);
/// Same, against a prebuilt store of b's facts.
std::size_t rule_support(const Clause& r, const FactStore& b, std::span<const Atom> pos);

}  // namespace rulesmith
