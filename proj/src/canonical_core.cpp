#include "canonical_core.hpp"

#include <algorithm>
#include <optional>

namespace rulesmith::detail {
namespace {

bool is_var(int code) { return code >= 0 && code < kConstantBase; }

class Search {
 public:
  Search(std::span<const CoreLiteral> body, int num_vars)
      : body_(body), mapping_(static_cast<std::size_t>(num_vars), -1), used_(body.size(), false) {}

  void map_head(std::span<const int> head_args) {
    for (int a : head_args) {
      if (is_var(a) && mapping_[static_cast<std::size_t>(a)] < 0) {
        mapping_[static_cast<std::size_t>(a)] = next_++;
      }
    }
    for (int a : head_args) head_.push_back(is_var(a) ? mapping_[static_cast<std::size_t>(a)] : a);
  }

  CanonicalForm run() {
    dfs();
    CanonicalForm out;
    out.order = std::move(best_order_);
    out.renaming = std::move(best_mapping_);
    out.body = std::move(best_);
    out.head = std::move(head_);
    if (body_.empty()) out.renaming = mapping_;
    return out;
  }

 private:
  // Renames `lit` under the current mapping, numbering unmapped variables
  // provisionally from next_ in order of first occurrence.
  CoreLiteral rename(const CoreLiteral& lit) const {
    CoreLiteral r{lit.pred, {}};
    r.args.reserve(lit.args.size());
    int fresh = next_;
    std::vector<std::pair<int, int>> local;
    for (int a : lit.args) {
      if (!is_var(a)) {
        r.args.push_back(a);
        continue;
      }
      int m = mapping_[static_cast<std::size_t>(a)];
      if (m < 0) {
        auto it = std::find_if(local.begin(), local.end(), [a](auto& p) { return p.first == a; });
        if (it == local.end()) {
          local.emplace_back(a, fresh);
          m = fresh++;
        } else {
          m = it->second;
        }
      }
      r.args.push_back(m);
    }
    return r;
  }

  void dfs() {
    if (seq_.size() == body_.size()) {
      if (!best_found_ || seq_ < best_) {
        best_ = seq_;
        best_order_ = order_;
        best_mapping_ = mapping_;
        best_found_ = true;
      }
      return;
    }
    std::optional<CoreLiteral> least;
    std::vector<CoreLiteral> renamed(body_.size());
    for (std::size_t i = 0; i < body_.size(); ++i) {
      if (used_[i]) continue;
      renamed[i] = rename(body_[i]);
      if (!least || renamed[i] < *least) least = renamed[i];
    }
    // A prefix already worse than the best complete sequence cannot win.
    if (best_found_) {
      std::size_t k = seq_.size();
      if (std::lexicographical_compare(best_.begin(), best_.begin() + static_cast<long>(k),
                                       seq_.begin(), seq_.end()))
        return;
      if (std::equal(seq_.begin(), seq_.end(), best_.begin()) && best_[k] < *least) return;
    }
    for (std::size_t i = 0; i < body_.size(); ++i) {
      if (used_[i] || renamed[i] != *least) continue;
      const int saved_next = next_;
      std::vector<int> touched;
      for (int a : body_[i].args) {
        if (is_var(a) && mapping_[static_cast<std::size_t>(a)] < 0) {
          mapping_[static_cast<std::size_t>(a)] = next_++;
          touched.push_back(a);
        }
      }
      used_[i] = true;
      seq_.push_back(renamed[i]);
      order_.push_back(i);
      dfs();
      order_.pop_back();
      seq_.pop_back();
      used_[i] = false;
      for (int a : touched) mapping_[static_cast<std::size_t>(a)] = -1;
      next_ = saved_next;
    }
  }

  std::span<const CoreLiteral> body_;
  std::vector<int> mapping_;
  std::vector<bool> used_;
  std::vector<int> head_;
  int next_ = 0;

  std::vector<CoreLiteral> seq_;
  std::vector<std::size_t> order_;
  bool best_found_ = false;
  std::vector<CoreLiteral> best_;
  std::vector<std::size_t> best_order_;
  std::vector<int> best_mapping_;
};

}  // namespace

CanonicalForm canonical_form(std::span<const int> head_args, std::span<const CoreLiteral> body,
                             int num_vars) {
  Search s(body, num_vars);
  s.map_head(head_args);
  return s.run();
}

}  // namespace rulesmith::detail
