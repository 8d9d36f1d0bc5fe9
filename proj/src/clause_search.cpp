#include "clause_search.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace rulesmith::detail {
namespace {

SearchDecl convert(const PredicateDecl& d, const std::map<std::string, int>& type_ids) {
  SearchDecl out{d.name, d.arity, std::vector<int>(d.arity, -1)};
  for (std::size_t i = 0; i < d.arg_types.size() && i < d.arity; ++i) out.types[i] = type_ids.at(d.arg_types[i]);
  return out;
}

bool decl_less(const SearchDecl& a, const SearchDecl& b) {
  return std::tie(a.name, a.arity) < std::tie(b.name, b.arity);
}

bool compatible(int a, int b) { return a < 0 || b < 0 || a == b; }

}  // namespace

SearchBias::SearchBias(const BiasSpec& bias) : max_vars(bias.max_vars), max_body(bias.max_body) {
  bias.check();
  std::map<std::string, int> type_ids;
  for (const auto& t : bias.types()) {
    type_ids.emplace(t, static_cast<int>(type_names.size()));
    type_names.push_back(t);
  }
  for (const auto& d : bias.head_decls) heads.push_back(convert(d, type_ids));
  for (const auto& d : bias.body_decls) {
    if (!bias.is_head(d.name, d.arity)) bodies.push_back(convert(d, type_ids));
  }
  std::sort(heads.begin(), heads.end(), decl_less);
  std::sort(bodies.begin(), bodies.end(), decl_less);
}

bool Node::range_restricted(const SearchBias& bias) const {
  const auto arity = static_cast<int>(bias.heads[static_cast<std::size_t>(head)].arity);
  std::vector<bool> seen(static_cast<std::size_t>(arity), false);
  for (const auto& lit : body) {
    for (int a : lit.args) {
      if (a < arity) seen[static_cast<std::size_t>(a)] = true;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::vector<int> Node::key() const {
  std::vector<int> k{head};
  for (const auto& lit : body) {
    k.push_back(-1 - lit.pred);
    k.insert(k.end(), lit.args.begin(), lit.args.end());
  }
  return k;
}

bool node_less(const Node& a, const Node& b) {
  if (a.body.size() != b.body.size()) return a.body.size() < b.body.size();
  if (a.head != b.head) return a.head < b.head;
  return a.body < b.body;
}

std::vector<Node> root_nodes(const SearchBias& bias) {
  std::vector<Node> out;
  for (std::size_t h = 0; h < bias.heads.size(); ++h) {
    const SearchDecl& d = bias.heads[h];
    if (d.arity > bias.max_vars) continue;
    Node n;
    n.head = static_cast<int>(h);
    n.num_vars = static_cast<int>(d.arity);
    n.var_types = d.types;
    out.push_back(std::move(n));
  }
  return out;
}

namespace {

// Builds every argument tuple for body declaration `decl` over `node`,
// allowing fresh variables up to the bound. Calls emit(args, types).
class ArgBuilder {
 public:
  ArgBuilder(const Node& node, const SearchDecl& decl, std::size_t max_vars)
      : node_(node), decl_(decl), max_vars_(static_cast<int>(max_vars)), types_(node.var_types) {}

  template <class Emit>
  void run(Emit&& emit) {
    args_.clear();
    go(node_.num_vars, false, emit);
  }

 private:
  template <class Emit>
  void go(int nv, bool connected, Emit& emit) {
    const std::size_t pos = args_.size();
    if (pos == decl_.arity) {
      if (connected) emit(args_, types_, nv);
      return;
    }
    const int want = decl_.types[pos];
    for (int v = 0; v < nv; ++v) {
      const int have = types_[static_cast<std::size_t>(v)];
      if (!compatible(want, have)) continue;
      const bool refine = have < 0 && want >= 0;
      if (refine) types_[static_cast<std::size_t>(v)] = want;
      args_.push_back(v);
      go(nv, connected || v < node_.num_vars, emit);
      args_.pop_back();
      if (refine) types_[static_cast<std::size_t>(v)] = -1;
    }
    if (nv < max_vars_) {
      types_.push_back(want);
      args_.push_back(nv);
      go(nv + 1, connected, emit);
      args_.pop_back();
      types_.pop_back();
    }
  }

  const Node& node_;
  const SearchDecl& decl_;
  int max_vars_;
  std::vector<int> args_;
  std::vector<int> types_;
};

}  // namespace

std::vector<Node> refinements(const Node& node, const SearchBias& bias) {
  std::vector<Node> out;
  if (node.body.size() >= bias.max_body) return out;
  const auto head_arity = bias.heads[static_cast<std::size_t>(node.head)].arity;
  std::vector<int> head_args(head_arity);
  for (std::size_t i = 0; i < head_arity; ++i) head_args[i] = static_cast<int>(i);

  for (std::size_t p = 0; p < bias.bodies.size(); ++p) {
    const SearchDecl& decl = bias.bodies[p];
    if (decl.arity == 0) continue;
    ArgBuilder builder(node, decl, bias.max_vars);
    builder.run([&](const std::vector<int>& args, const std::vector<int>& types, int nv) {
      CoreLiteral lit{static_cast<int>(p), args};
      if (std::find(node.body.begin(), node.body.end(), lit) != node.body.end()) return;
      std::vector<CoreLiteral> body = node.body;
      body.push_back(std::move(lit));
      const CanonicalForm form = canonical_form(head_args, body, nv);
      Node child;
      child.head = node.head;
      child.body = form.body;
      child.num_vars = nv;
      child.var_types.assign(static_cast<std::size_t>(nv), -1);
      for (int v = 0; v < nv; ++v) {
        child.var_types[static_cast<std::size_t>(form.renaming[static_cast<std::size_t>(v)])] =
            types[static_cast<std::size_t>(v)];
      }
      out.push_back(std::move(child));
    });
  }
  return out;
}

std::vector<Node> next_level(const std::vector<Node>& level, const SearchBias& bias,
                             std::vector<std::size_t>* parents) {
  std::vector<Node> out;
  std::unordered_set<std::vector<int>, KeyHash> seen;
  if (parents) parents->clear();
  for (std::size_t i = 0; i < level.size(); ++i) {
    for (auto& child : refinements(level[i], bias)) {
      if (!seen.insert(child.key()).second) continue;
      out.push_back(std::move(child));
      if (parents) parents->push_back(i);
    }
  }
  return out;
}

Clause to_clause(const Node& node, const SearchBias& bias) {
  auto var = [](int v) { return Term::variable("V" + std::to_string(v)); };
  const SearchDecl& h = bias.heads[static_cast<std::size_t>(node.head)];
  Clause c;
  c.head.predicate = h.name;
  for (std::size_t i = 0; i < h.arity; ++i) c.head.args.push_back(var(static_cast<int>(i)));
  for (const auto& lit : node.body) {
    Atom a{bias.bodies[static_cast<std::size_t>(lit.pred)].name, {}};
    for (int v : lit.args) a.args.push_back(var(v));
    c.body.push_back(std::move(a));
  }
  return c;
}

RefinementGraph::RefinementGraph(SearchBias bias) : bias_(std::move(bias)) {
  std::lock_guard lock(mu_);
  for (auto& n : root_nodes(bias_)) roots_.push_back(intern(std::move(n)));
}

std::uint32_t RefinementGraph::intern(Node n) {
  auto [it, fresh] = ids_.try_emplace(n.key(), static_cast<std::uint32_t>(nodes_.size()));
  if (fresh) {
    nodes_.push_back(std::move(n));
    children_.emplace_back();
  }
  return it->second;
}

Node RefinementGraph::node(std::uint32_t id) const {
  std::lock_guard lock(mu_);
  return nodes_[id];
}

std::vector<std::uint32_t> RefinementGraph::next_level(const std::vector<std::uint32_t>& level,
                                                       std::vector<std::size_t>* parents) {
  std::lock_guard lock(mu_);
  std::vector<std::uint32_t> out;
  std::unordered_set<std::uint32_t> seen;
  if (parents) parents->clear();
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (!children_[level[i]]) {
      std::vector<std::uint32_t> kids;
      std::unordered_set<std::uint32_t> mine;
      for (auto& child : refinements(nodes_[level[i]], bias_)) {
        const std::uint32_t id = intern(std::move(child));
        if (mine.insert(id).second) kids.push_back(id);
      }
      children_[level[i]] = std::move(kids);
    }
    for (std::uint32_t id : *children_[level[i]]) {
      if (!seen.insert(id).second) continue;
      out.push_back(id);
      if (parents) parents->push_back(i);
    }
  }
  return out;
}

namespace {

std::string fingerprint(const SearchBias& b) {
  std::string out = std::to_string(b.max_vars) + "/" + std::to_string(b.max_body) + "|";
  for (const auto* decls : {&b.heads, &b.bodies}) {
    for (const auto& d : *decls) {
      out += d.name + "/" + std::to_string(d.arity) + ":";
      for (int t : d.types) out += std::to_string(t) + ",";
      out += ";";
    }
    out += "|";
  }
  for (const auto& t : b.type_names) out += t + ",";
  return out;
}

}  // namespace

std::shared_ptr<RefinementGraph> refinement_graph(const SearchBias& bias) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<RefinementGraph>> cache;
  const std::string key = fingerprint(bias);
  std::lock_guard lock(mu);
  auto& g = cache[key];
  if (!g) g = std::make_shared<RefinementGraph>(bias);
  return g;
}

}  // namespace rulesmith::detail
