#include "lpcount/counting.hpp"

#include <istream>
#include <ostream>

#include "binio.hpp"
#include "varset.hpp"

namespace lpc {

std::string to_string(const Count& c) { return c.get_str(); }

namespace {

std::uint32_t var_of(CnfLiteral l) { return static_cast<std::uint32_t>(l < 0 ? -l : l); }

constexpr std::uint32_t kGraphMagic = 0x47435043;  // "CPCG"
constexpr std::uint32_t kGraphVersion = 1;

// Marks, per literal code, whether the literal is contradicted by the assumptions.
// Returns false for an inconsistent set; `blocked` is left cleared in that case.
bool mark_blocked(std::span<const Literal> lits, std::size_t atom_count, std::vector<char>& blocked) {
  blocked.assign(2 * atom_count, 0);
  for (Literal l : lits) {
    if (l.atom >= atom_count) throw std::invalid_argument("assumption mentions an atom outside the graph");
    if (blocked[l.code()]) return false;
    blocked[(~l).code()] = 1;
  }
  return true;
}

}  // namespace

CountingGraph::CountingGraph(NnfDag dag, std::vector<std::optional<AtomId>> var_atoms, std::size_t atom_count)
    : dag_(std::move(dag)), var_atoms_(std::move(var_atoms)), atom_count_(atom_count) {
  if (dag_.node_count() == 0) throw NotSmoothError("counting graph over an empty NNF");
  if (var_atoms_.size() != dag_.num_vars()) throw std::invalid_argument("variable map does not match the NNF");
  for (const auto& a : var_atoms_) {
    if (a && *a >= atom_count_) throw std::invalid_argument("variable mapped to an unknown atom");
  }
  NnfReport r = validate(dag_);
  if (!r.sd_dnnf()) {
    std::string missing;
    if (!r.decomposable) missing += " decomposable";
    if (!r.deterministic) missing += " deterministic";
    if (!r.smooth) missing += " smooth";
    throw NotSmoothError("NNF is not:" + missing);
  }
  if (!dag_.is_false()) {
    std::vector<detail::VarSet> vars;
    vars.reserve(dag_.node_count());
    for (const NnfNode& n : dag_.nodes()) {
      detail::VarSet s(dag_.num_vars());
      if (n.kind == NodeKind::literal) {
        s.set(var_of(n.lit));
      } else {
        for (NodeId c : n.children) s |= vars[c];
      }
      vars.push_back(std::move(s));
    }
    if (vars[dag_.root()].count() != dag_.num_vars()) {
      throw NotSmoothError("NNF root does not mention every variable");
    }
  }
}

Count CountingGraph::evaluate(const AssumptionSet& assumptions, EvalStats* stats) const {
  std::vector<char> blocked;
  if (!mark_blocked(assumptions.literals(), atom_count_, blocked)) return 0;
  std::vector<Count> val(dag_.node_count());
  for (NodeId id = 0; id < dag_.node_count(); ++id) {
    const NnfNode& n = dag_.node(id);
    switch (n.kind) {
      case NodeKind::literal: {
        const auto& atom = var_atoms_[var_of(n.lit) - 1];
        val[id] = atom && blocked[Literal{*atom, n.lit > 0}.code()] ? 0 : 1;
        break;
      }
      case NodeKind::conj:
        val[id] = 1;
        for (NodeId c : n.children) val[id] *= val[c];
        break;
      case NodeKind::disj:
        val[id] = 0;
        for (NodeId c : n.children) val[id] += val[c];
        break;
    }
  }
  if (stats) {
    stats->nodes_visited = dag_.node_count();
    stats->wide = true;
  }
  return val[dag_.root()];
}

CompressedGraph CompressedGraph::compress(const CountingGraph& g, CompressStats* stats) {
  constexpr std::uint32_t kIgnored = static_cast<std::uint32_t>(-1);
  const NnfDag& dag = g.dag();
  CompressStats local;

  // First traversal: children precede parents, so one forward sweep is bottom-up.
  // target[i] is the original node that stands for i, or kIgnored.
  std::vector<std::uint32_t> target(dag.node_count(), kIgnored);
  std::vector<std::vector<std::uint32_t>> kept(dag.node_count());
  for (NodeId id = 0; id < dag.node_count(); ++id) {
    const NnfNode& n = dag.node(id);
    if (n.kind == NodeKind::literal) {
      if (g.var_atoms()[var_of(n.lit) - 1]) {
        target[id] = id;
      } else {
        ++local.ignored;
      }
      continue;
    }
    if (n.children.empty()) {
      target[id] = id;  // constant
      continue;
    }
    for (NodeId c : n.children) {
      if (target[c] != kIgnored) kept[id].push_back(target[c]);
    }
    if (kept[id].empty()) {
      ++local.ignored;
    } else if (kept[id].size() == 1) {
      target[id] = kept[id][0];
      kept[id].clear();
      ++local.absorbed;
    } else {
      target[id] = id;
    }
  }
  ++local.traversals;

  // Second traversal: emit retained nodes with children redirected.
  CompressedGraph out;
  out.atom_count_ = g.atom_count();
  std::vector<std::uint32_t> index(dag.node_count(), kIgnored);
  for (NodeId id = 0; id < dag.node_count(); ++id) {
    if (target[id] != id) continue;
    const NnfNode& n = dag.node(id);
    CompressedNode c;
    c.kind = n.kind;
    if (n.kind == NodeKind::literal) {
      c.lit = Literal{*g.var_atoms()[var_of(n.lit) - 1], n.lit > 0};
    } else {
      c.children.reserve(kept[id].size());
      for (std::uint32_t k : kept[id]) c.children.push_back(index[k]);
    }
    index[id] = static_cast<std::uint32_t>(out.nodes_.size());
    out.nodes_.push_back(std::move(c));
    out.provenance_.push_back(id);
  }
  ++local.traversals;

  std::uint32_t root = target[dag.root()];
  if (root == kIgnored) {
    out.root_ = static_cast<std::uint32_t>(out.nodes_.size());
    out.nodes_.push_back(CompressedNode{NodeKind::conj, {}, {}});
    out.provenance_.push_back(dag.root());
  } else {
    out.root_ = index[root];
  }
  if (stats) *stats = local;
  return out;
}

Count CompressedGraph::evaluate(const AssumptionSet& assumptions, EvalStats* stats) const {
  Evaluator e(*this);
  return e(assumptions, stats);
}

SizeReport CompressedGraph::size_report() const {
  SizeReport r{nodes_.size(), 0};
  for (const auto& n : nodes_) r.edge_count += n.children.size();
  return r;
}

void CompressedGraph::write(std::ostream& out) const {
  using namespace detail;
  put_u32(out, kGraphMagic);
  put_u32(out, kGraphVersion);
  put_u64(out, atom_count_);
  put_u32(out, static_cast<std::uint32_t>(nodes_.size()));
  put_u64(out, size_report().edge_count);
  put_u32(out, root_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const CompressedNode& n = nodes_[i];
    put_u32(out, static_cast<std::uint32_t>(n.kind));
    put_u32(out, n.kind == NodeKind::literal ? n.lit.code() : 0);
    put_u32(out, provenance_[i]);
    put_u32(out, static_cast<std::uint32_t>(n.children.size()));
    for (std::uint32_t c : n.children) put_u32(out, c);
  }
}

CompressedGraph CompressedGraph::read(std::istream& in) {
  using namespace detail;
  if (get_u32(in) != kGraphMagic) throw std::runtime_error("not a compressed counting graph");
  if (get_u32(in) != kGraphVersion) throw std::runtime_error("unsupported compressed graph version");
  CompressedGraph g;
  g.atom_count_ = get_u64(in);
  std::uint32_t count = get_u32(in);
  std::uint64_t edges = get_u64(in);
  g.root_ = get_u32(in);
  if (count == 0 || g.root_ >= count) throw std::runtime_error("compressed graph root out of range");
  std::uint64_t seen_edges = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    CompressedNode n;
    std::uint32_t kind = get_u32(in);
    if (kind > static_cast<std::uint32_t>(NodeKind::disj)) throw std::runtime_error("bad node kind");
    n.kind = static_cast<NodeKind>(kind);
    std::uint32_t code = get_u32(in);
    if (n.kind == NodeKind::literal) {
      if (code / 2 >= g.atom_count_) throw std::runtime_error("literal atom out of range");
      n.lit = Literal{code / 2, code % 2 == 0};
    }
    g.provenance_.push_back(get_u32(in));
    std::uint32_t k = get_u32(in);
    if (n.kind == NodeKind::literal && k != 0) throw std::runtime_error("literal node with children");
    seen_edges += k;
    if (seen_edges > edges) throw std::runtime_error("edge count exceeds header");
    n.children.resize(k);
    for (auto& c : n.children) {
      c = get_u32(in);
      if (c >= i) throw std::runtime_error("child does not precede its parent");
    }
    g.nodes_.push_back(std::move(n));
  }
  if (seen_edges != edges) throw std::runtime_error("edge count does not match header");
  return g;
}

Count Evaluator::operator()(const AssumptionSet& assumptions, EvalStats* stats) {
  return (*this)(std::span<const Literal>(assumptions.literals()), stats);
}

Count Evaluator::operator()(std::span<const Literal> literals, EvalStats* stats) {
  const auto& nodes = graph_->nodes();
  if (!mark_blocked(literals, graph_->atom_count(), blocked_)) {
    if (stats) *stats = {};
    return 0;
  }
  if (stats) stats->nodes_visited = nodes.size();

  // 64-bit pass first; any overflow restarts in arbitrary precision.
  narrow_.resize(nodes.size());
  bool overflow = false;
  for (std::size_t i = 0; i < nodes.size() && !overflow; ++i) {
    const CompressedNode& n = nodes[i];
    std::uint64_t v = 0;
    switch (n.kind) {
      case NodeKind::literal: v = blocked_[n.lit.code()] ? 0 : 1; break;
      case NodeKind::conj:
        v = 1;
        for (std::uint32_t c : n.children) overflow |= __builtin_mul_overflow(v, narrow_[c], &v);
        break;
      case NodeKind::disj:
        for (std::uint32_t c : n.children) overflow |= __builtin_add_overflow(v, narrow_[c], &v);
        break;
    }
    narrow_[i] = v;
  }
  if (!overflow) {
    if (stats) stats->wide = false;
    return Count(static_cast<unsigned long>(narrow_[graph_->root()]));
  }

  wide_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const CompressedNode& n = nodes[i];
    Count& v = wide_[i];
    switch (n.kind) {
      case NodeKind::literal: v = blocked_[n.lit.code()] ? 0 : 1; break;
      case NodeKind::conj:
        v = 1;
        for (std::uint32_t c : n.children) v *= wide_[c];
        break;
      case NodeKind::disj:
        v = 0;
        for (std::uint32_t c : n.children) v += wide_[c];
        break;
    }
  }
  if (stats) stats->wide = true;
  return wide_[graph_->root()];
}

}  // namespace lpc
