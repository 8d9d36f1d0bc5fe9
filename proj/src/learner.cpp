#include "rulesmith/learner.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>

#include "clause_search.hpp"
#include "join.hpp"
#include "rulesmith/entailment.hpp"
#include "rulesmith/text_format.hpp"

namespace rulesmith {

std::string_view to_string(SolveOutcome o) {
  switch (o) {
    case SolveOutcome::hypothesis: return "hypothesis";
    case SolveOutcome::no_hypothesis: return "no_hypothesis";
    case SolveOutcome::timeout: return "timeout";
  }
  return "?";
}

void for_each_clause(const BiasSpec& bias, const std::function<bool(const Clause&)>& visit) {
  const detail::SearchBias sb(bias);
  std::vector<detail::Node> level = detail::root_nodes(sb);
  for (std::size_t len = 1; len <= sb.max_body && !level.empty(); ++len) {
    level = detail::next_level(level, sb);
    std::vector<const detail::Node*> ready;
    for (const auto& n : level) {
      if (n.range_restricted(sb)) ready.push_back(&n);
    }
    std::sort(ready.begin(), ready.end(), [](auto* a, auto* b) { return detail::node_less(*a, *b); });
    for (const auto* n : ready) {
      if (!visit(detail::to_clause(*n, sb))) return;
    }
  }
}

std::vector<Clause> enumerate_clauses(const BiasSpec& bias) {
  std::vector<Clause> out;
  for_each_clause(bias, [&](const Clause& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

Verification verify(const Program& b, const Program& h, const ExampleSet& exs) {
  Verification v;
  const Coverage cov = coverage(b, h, exs);
  const std::set<Atom> hit(cov.covered_pos.begin(), cov.covered_pos.end());
  for (const auto& e : exs.positives()) {
    if (!hit.contains(e)) v.missed.push_back(e);
  }
  v.covered_neg = cov.covered_neg;
  if (!v.covered_neg.empty()) {
    v.status = Verification::Status::unsound;
  } else if (!v.missed.empty()) {
    v.status = Verification::Status::incomplete;
  }
  return v;
}

namespace {

using Clock = std::chrono::steady_clock;
using Bits = std::vector<std::uint8_t>;
using Indices = std::vector<std::uint32_t>;

struct Candidate {
  detail::Node node;
  Clause clause;
  Bits pos;  // over the open positives
};

std::size_t count(const Bits& b) { return static_cast<std::size_t>(std::count(b.begin(), b.end(), true)); }
bool any(const Bits& b) { return std::find(b.begin(), b.end(), true) != b.end(); }

// Examples compiled to store ids. Constants unknown to the store get ids
// past the end so they never match a row.
struct CompiledExample {
  int head = -1;  // index into SearchBias::heads, -1 when undeclared
  std::vector<std::uint32_t> args;
};

class Problem {
 public:
  Problem(const SolverRequest& req, const detail::SearchBias& sb)
      : sb_(sb), store_(req.background) {
    store_.add_universe(req.examples);
    for (const auto& e : req.examples.positives()) {
      if (!store_.contains(e)) open_pos_.push_back(e);
    }
    for (const auto& e : req.examples.negatives()) {
      if (store_.contains(e)) negative_in_background_ = true;
    }
    for (const auto& e : open_pos_) pos_.push_back(compile(e));
    for (const auto& e : req.examples.negatives()) neg_.push_back(compile(e));
    for (const auto& d : sb_.bodies) {
      const auto id = store_.predicate_id(d.name, d.arity);
      body_rel_.push_back(id ? &store_.relation(*id) : nullptr);
    }
  }

  bool negative_in_background() const { return negative_in_background_; }
  const std::vector<Atom>& open_positives() const { return open_pos_; }
  const FactStore& store() const { return store_; }
  std::size_t num_neg() const { return neg_.size(); }

  // Positives and negatives among the given candidates (ascending example
  // indices) covered by `node`, decided top-down per example.
  void cover(const detail::Node& node, const Indices& pos_in, const Indices& neg_in, Indices& pos_out,
             Indices& neg_out) const {
    std::vector<detail::JoinLiteral> lits;
    lits.reserve(node.body.size());
    for (const auto& lit : node.body) {
      detail::JoinLiteral j;
      j.relation = body_rel_[static_cast<std::size_t>(lit.pred)];
      for (int v : lit.args) j.args.push_back({true, static_cast<std::uint32_t>(v)});
      lits.push_back(std::move(j));
    }
    std::vector<std::uint32_t> binding(static_cast<std::size_t>(node.num_vars), detail::kUnbound);
    detail::Joiner joiner(lits);
    auto test = [&](const CompiledExample& e) {
      if (e.head != node.head) return false;
      std::fill(binding.begin(), binding.end(), detail::kUnbound);
      for (std::size_t i = 0; i < e.args.size(); ++i) binding[i] = e.args[i];
      return !joiner.run(binding, [](const std::vector<std::uint32_t>&) { return false; });
    };
    pos_out.clear();
    neg_out.clear();
    for (std::uint32_t i : pos_in) {
      if (test(pos_[i])) pos_out.push_back(i);
    }
    for (std::uint32_t i : neg_in) {
      if (test(neg_[i])) neg_out.push_back(i);
    }
  }

 private:
  CompiledExample compile(const Atom& e) {
    CompiledExample out;
    for (std::size_t h = 0; h < sb_.heads.size(); ++h) {
      if (sb_.heads[h].name == e.predicate && sb_.heads[h].arity == e.arity()) out.head = static_cast<int>(h);
    }
    for (const auto& t : e.args) out.args.push_back(*store_.constant_id(t.name()));
    return out;
  }

  const detail::SearchBias& sb_;
  FactStore store_;
  std::vector<Atom> open_pos_;
  bool negative_in_background_ = false;
  std::vector<CompiledExample> pos_;
  std::vector<CompiledExample> neg_;
  std::vector<const Relation*> body_rel_;
};

struct SearchState {
  Clock::time_point deadline;
  std::atomic<bool> expired{false};
  std::atomic<std::size_t> evaluated{0};

  bool check() {
    if (!expired.load(std::memory_order_relaxed) && Clock::now() >= deadline) expired = true;
    return expired.load(std::memory_order_relaxed);
  }
};

std::vector<Candidate> pruned_candidates(const Problem& pb, const detail::SearchBias& sb, bool parallel,
                                         SearchState& st) {
  struct Entry {
    std::uint32_t id = 0;
    detail::Node node;
    Indices pos, neg;
  };
  const auto graph = detail::refinement_graph(sb);
  std::vector<Candidate> out;
  Indices all_pos(pb.open_positives().size()), all_neg(pb.num_neg());
  std::iota(all_pos.begin(), all_pos.end(), 0u);
  std::iota(all_neg.begin(), all_neg.end(), 0u);
  std::vector<Entry> frontier;
  for (std::uint32_t id : graph->roots()) frontier.push_back({id, graph->node(id), all_pos, all_neg});

  for (std::size_t len = 1; len <= sb.max_body && !frontier.empty(); ++len) {
    std::vector<std::uint32_t> roots;
    roots.reserve(frontier.size());
    for (const auto& e : frontier) roots.push_back(e.id);
    std::vector<std::size_t> parent;
    const std::vector<std::uint32_t> ids = graph->next_level(roots, &parent);
    std::vector<detail::Node> level;
    level.reserve(ids.size());
    for (std::uint32_t id : ids) level.push_back(graph->node(id));
    std::vector<Entry> evaluated(level.size());

    const auto n = static_cast<std::ptrdiff_t>(level.size());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (st.check()) continue;
      const auto k = static_cast<std::size_t>(i);
      const Entry& from = frontier[parent[k]];
      Entry& e = evaluated[k];
      e.id = ids[k];
      e.node = std::move(level[k]);
      pb.cover(e.node, from.pos, from.neg, e.pos, e.neg);
      st.evaluated.fetch_add(1, std::memory_order_relaxed);
    }
    if (st.expired) return {};

    std::vector<Entry> next;
    for (auto& e : evaluated) {
      if (e.pos.empty()) continue;
      if (e.neg.empty() && e.node.range_restricted(sb)) {
        Bits pos(pb.open_positives().size(), false);
        for (std::uint32_t k : e.pos) pos[k] = true;
        out.push_back({e.node, detail::to_clause(e.node, sb), std::move(pos)});
        continue;
      }
      if (len < sb.max_body) next.push_back(std::move(e));
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return detail::node_less(a.node, b.node); });
  return out;
}

std::vector<Candidate> exhaustive_candidates(const Problem& pb, const SolverRequest& req, SearchState& st) {
  std::vector<Candidate> out;
  const auto& open = pb.open_positives();
  const std::set<Atom> negatives(req.examples.negatives().begin(), req.examples.negatives().end());
  for_each_clause(req.bias, [&](const Clause& c) {
    if (st.check()) return false;
    st.evaluated.fetch_add(1, std::memory_order_relaxed);
    const auto derived = derive_once(pb.store(), c);
    if (std::any_of(derived.begin(), derived.end(), [&](const Atom& a) { return negatives.contains(a); })) return true;
    const std::set<Atom> model(derived.begin(), derived.end());
    Bits pos(open.size(), false);
    for (std::size_t i = 0; i < open.size(); ++i) pos[i] = model.contains(open[i]);
    if (any(pos)) out.push_back({detail::Node{}, c, std::move(pos)});
    return true;
  });
  return out;
}

// Candidates arrive in (body length, canonical) order, so the earliest index
// wins ties on uncovered count and length.
Program greedy_cover(const std::vector<Candidate>& cands, std::size_t num_pos, std::size_t max_clauses) {
  Program h;
  Bits covered(num_pos, false);
  std::vector<bool> taken(cands.size(), false);
  while (h.size() < max_clauses && count(covered) < num_pos) {
    std::size_t best = cands.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (taken[i]) continue;
      std::size_t gain = 0;
      for (std::size_t k = 0; k < num_pos; ++k) gain += cands[i].pos[k] && !covered[k];
      const bool better = gain > best_gain ||
                          (gain == best_gain && gain > 0 && best < cands.size() &&
                           cands[i].clause.body.size() < cands[best].clause.body.size());
      if (better) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == cands.size()) break;
    taken[best] = true;
    h.add(cands[best].clause);
    for (std::size_t k = 0; k < num_pos; ++k) covered[k] = covered[k] || cands[best].pos[k];
  }
  if (count(covered) < num_pos) return Program{};
  return h;
}

}  // namespace

SolverResult solve(const SolverRequest& request, SearchOptions options) {
  const auto start = Clock::now();
  const detail::SearchBias sb(request.bias);
  SolverResult result;
  auto finish = [&](SolveOutcome o) {
    result.outcome = o;
    result.stats.elapsed = Clock::now() - start;
    return result;
  };

  const Problem pb(request, sb);
  if (pb.negative_in_background()) return finish(SolveOutcome::no_hypothesis);
  const std::size_t num_pos = pb.open_positives().size();
  if (num_pos == 0) return finish(SolveOutcome::hypothesis);

  SearchState st;
  st.deadline = start + request.timeout;
  std::vector<Candidate> cands = options.mode == SearchMode::pruned
                                     ? pruned_candidates(pb, sb, options.parallel, st)
                                     : exhaustive_candidates(pb, request, st);
  result.stats.clauses_enumerated = st.evaluated.load();
  if (st.expired) return finish(SolveOutcome::timeout);
  result.stats.candidates_negative_safe = cands.size();

  Program h = greedy_cover(cands, num_pos, request.bias.max_clauses);
  if (h.empty()) return finish(SolveOutcome::no_hypothesis);
  if (!verify(request.background, h, request.examples).consistent()) {
    throw std::logic_error("learned hypothesis failed verification:\n" + print_program(h));
  }
  result.hypothesis = std::move(h);
  return finish(SolveOutcome::hypothesis);
}

std::string ReferenceSolver::name() const {
  return options_.mode == SearchMode::pruned ? "reference-pruned" : "reference-exhaustive";
}

SolverResult ReferenceSolver::solve(const SolverRequest& request) const {
  return rulesmith::solve(request, options_);
}

}  // namespace rulesmith
