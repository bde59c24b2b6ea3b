#include "lpcount/nnf.hpp"

#include <algorithm>
#include <unordered_map>

#include "varset.hpp"

namespace lpc {

namespace {

using detail::VarSet;

std::uint32_t var_of(CnfLiteral l) { return static_cast<std::uint32_t>(l < 0 ? -l : l); }

std::vector<VarSet> node_vars(const NnfDag& dag) {
  std::vector<VarSet> vars;
  vars.reserve(dag.node_count());
  for (const NnfNode& n : dag.nodes()) {
    VarSet s(dag.num_vars());
    if (n.kind == NodeKind::literal) {
      s.set(var_of(n.lit));
    } else {
      for (NodeId c : n.children) s |= vars[c];
    }
    vars.push_back(std::move(s));
  }
  return vars;
}

// Literals a node asserts directly: itself if a literal, its literal children if a conjunction.
std::vector<CnfLiteral> asserted(const NnfDag& dag, NodeId id) {
  const NnfNode& n = dag.node(id);
  if (n.kind == NodeKind::literal) return {n.lit};
  std::vector<CnfLiteral> out;
  if (n.kind == NodeKind::conj) {
    for (NodeId c : n.children) {
      if (dag.node(c).kind == NodeKind::literal) out.push_back(dag.node(c).lit);
    }
  }
  return out;
}

bool decision_shaped(const NnfDag& dag, const NnfNode& n) {
  if (n.children.size() < 2) return true;
  if (n.children.size() != 2) return false;
  auto left = asserted(dag, n.children[0]);
  auto right = asserted(dag, n.children[1]);
  for (CnfLiteral l : left) {
    if (n.decision != 0 && var_of(l) != n.decision) continue;
    if (std::find(right.begin(), right.end(), -l) != right.end()) return true;
  }
  return false;
}

}  // namespace

NnfReport validate(const NnfDag& dag) {
  NnfReport report;
  auto vars = node_vars(dag);
  for (const NnfNode& n : dag.nodes()) {
    if (n.kind == NodeKind::conj) {
      VarSet seen(dag.num_vars());
      for (NodeId c : n.children) {
        if (seen.intersects(vars[c])) report.decomposable = false;
        seen |= vars[c];
      }
    } else if (n.kind == NodeKind::disj) {
      if (!decision_shaped(dag, n)) report.deterministic = false;
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        if (!(vars[n.children[i]] == vars[n.children[0]])) report.smooth = false;
      }
    }
  }
  return report;
}

NnfDag smooth(const NnfDag& dag) {
  NnfDag out(dag.num_vars());
  std::vector<NodeId> remap(dag.node_count(), 0);
  std::vector<VarSet> vars;  // indexed by new node id
  std::unordered_map<std::uint32_t, NodeId> gadgets;

  auto track = [&](NodeId id) {
    const NnfNode& n = out.node(id);
    VarSet s(dag.num_vars());
    if (n.kind == NodeKind::literal) {
      s.set(var_of(n.lit));
    } else {
      for (NodeId c : n.children) s |= vars[c];
    }
    vars.push_back(std::move(s));
    return id;
  };
  auto gadget = [&](std::uint32_t v) {
    auto it = gadgets.find(v);
    if (it != gadgets.end()) return it->second;
    NodeId p = track(out.add_literal(static_cast<CnfLiteral>(v)));
    NodeId n = track(out.add_literal(-static_cast<CnfLiteral>(v)));
    NodeId g = track(out.add_or({p, n}, v));
    gadgets.emplace(v, g);
    return g;
  };
  // child extended by free-variable gadgets for `missing`
  auto pad = [&](NodeId child, const std::vector<std::uint32_t>& missing) {
    if (missing.empty()) return child;
    std::vector<NodeId> extra;
    for (std::uint32_t v : missing) extra.push_back(gadget(v));
    if (out.node(child).kind == NodeKind::conj) {
      std::vector<NodeId> children = out.node(child).children;
      children.insert(children.end(), extra.begin(), extra.end());
      return track(out.add_and(std::move(children)));
    }
    extra.insert(extra.begin(), child);
    return track(out.add_and(std::move(extra)));
  };

  for (NodeId id = 0; id < dag.node_count(); ++id) {
    const NnfNode& n = dag.node(id);
    std::vector<NodeId> children;
    for (NodeId c : n.children) children.push_back(remap[c]);
    switch (n.kind) {
      case NodeKind::literal: remap[id] = track(out.add_literal(n.lit)); break;
      case NodeKind::conj: remap[id] = track(out.add_and(std::move(children))); break;
      case NodeKind::disj: {
        VarSet all(dag.num_vars());
        for (NodeId c : children) all |= vars[c];
        for (NodeId& c : children) c = pad(c, all.minus(vars[c]));
        remap[id] = track(out.add_or(std::move(children), n.decision));
        break;
      }
    }
  }
  NodeId root = remap[dag.root()];
  if (!dag.is_false()) {
    VarSet all(dag.num_vars());
    for (std::uint32_t v = 1; v <= dag.num_vars(); ++v) all.set(v);
    root = pad(root, all.minus(vars[root]));
  }
  out.set_root(root);
  return out;
}

std::uint64_t brute_force_count(const NnfDag& dag) {
  if (dag.num_vars() > 24) throw std::length_error("brute-force NNF count limited to 24 variables");
  std::uint64_t count = 0;
  std::vector<char> value(dag.node_count(), 0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << dag.num_vars()); ++m) {
    for (NodeId id = 0; id < dag.node_count(); ++id) {
      const NnfNode& n = dag.node(id);
      switch (n.kind) {
        case NodeKind::literal: {
          bool truth = (m >> (var_of(n.lit) - 1)) & 1U;
          value[id] = n.lit > 0 ? truth : !truth;
          break;
        }
        case NodeKind::conj:
          value[id] = std::all_of(n.children.begin(), n.children.end(), [&](NodeId c) { return value[c] != 0; });
          break;
        case NodeKind::disj:
          value[id] = std::any_of(n.children.begin(), n.children.end(), [&](NodeId c) { return value[c] != 0; });
          break;
      }
    }
    count += value[dag.root()] ? 1 : 0;
  }
  return count;
}

}  // namespace lpc
