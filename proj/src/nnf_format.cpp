#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "lpcount/nnf.hpp"

namespace lpc {

NodeId NnfDag::push(NnfNode n) {
  for (NodeId c : n.children) {
    if (c >= nodes_.size()) throw std::out_of_range("NNF child must precede its parent");
  }
  nodes_.push_back(std::move(n));
  root_ = static_cast<NodeId>(nodes_.size() - 1);
  return root_;
}

NodeId NnfDag::add_literal(CnfLiteral lit) {
  auto var = static_cast<std::uint32_t>(lit < 0 ? -lit : lit);
  if (lit == 0 || var > num_vars_) throw std::out_of_range("NNF literal out of range");
  return push(NnfNode{NodeKind::literal, lit, 0, {}});
}

NodeId NnfDag::add_and(std::vector<NodeId> children) {
  return push(NnfNode{NodeKind::conj, 0, 0, std::move(children)});
}

NodeId NnfDag::add_or(std::vector<NodeId> children, std::uint32_t decision) {
  return push(NnfNode{NodeKind::disj, 0, decision, std::move(children)});
}

void NnfDag::set_root(NodeId root) {
  if (root >= nodes_.size()) throw std::out_of_range("NNF root out of range");
  root_ = root;
}

std::size_t NnfDag::edge_count() const {
  std::size_t e = 0;
  for (const NnfNode& n : nodes_) e += n.children.size();
  return e;
}

NnfDag NnfDag::constant(std::uint32_t num_vars, bool value) {
  NnfDag d(num_vars);
  if (value) {
    d.add_and({});
  } else {
    d.add_or({});
  }
  return d;
}

bool NnfDag::is_false() const {
  if (nodes_.empty()) return false;
  const NnfNode& r = nodes_[root_];
  return r.kind == NodeKind::disj && r.children.empty();
}

NnfParseError::NnfParseError(std::size_t line, const std::string& what)
    : std::runtime_error("nnf line " + std::to_string(line) + ": " + what) {}

NnfDag read_nnf(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t declared_nodes = 0;
  std::size_t declared_edges = 0;
  std::uint32_t declared_vars = 0;
  bool header = false;
  NnfDag dag;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!header) {
      if (tag != "nnf" || !(ls >> declared_nodes >> declared_edges >> declared_vars)) {
        throw NnfParseError(line_no, "expected header 'nnf <nodes> <edges> <vars>'");
      }
      header = true;
      dag = NnfDag(declared_vars);
      continue;
    }
    if (dag.node_count() >= declared_nodes) throw NnfParseError(line_no, "more nodes than declared");
    const auto self = static_cast<NodeId>(dag.node_count());
    auto read_children = [&](std::size_t count) {
      std::vector<NodeId> children(count);
      for (auto& c : children) {
        long long id = -1;
        if (!(ls >> id) || id < 0) throw NnfParseError(line_no, "malformed child list");
        if (static_cast<std::size_t>(id) >= declared_nodes) {
          throw NnfParseError(line_no, "dangling child reference " + std::to_string(id));
        }
        if (static_cast<NodeId>(id) >= self) {
          throw NnfParseError(line_no, "cyclic or forward child reference " + std::to_string(id));
        }
        c = static_cast<NodeId>(id);
      }
      return children;
    };
    if (tag == "L") {
      long long lit = 0;
      if (!(ls >> lit) || lit == 0 || static_cast<std::uint64_t>(lit < 0 ? -lit : lit) > declared_vars) {
        throw NnfParseError(line_no, "malformed literal");
      }
      dag.add_literal(static_cast<CnfLiteral>(lit));
    } else if (tag == "A") {
      std::size_t count = 0;
      if (!(ls >> count)) throw NnfParseError(line_no, "malformed AND node");
      dag.add_and(read_children(count));
    } else if (tag == "O") {
      std::uint32_t decision = 0;
      std::size_t count = 0;
      if (!(ls >> decision >> count)) throw NnfParseError(line_no, "malformed OR node");
      if (decision > declared_vars) throw NnfParseError(line_no, "decision variable out of range");
      dag.add_or(read_children(count), decision);
    } else {
      throw NnfParseError(line_no, "unknown node type '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) throw NnfParseError(line_no, "trailing tokens");
  }
  if (!header) throw NnfParseError(line_no, "missing header");
  if (dag.node_count() != declared_nodes) throw NnfParseError(line_no, "fewer nodes than declared");
  if (dag.edge_count() != declared_edges) throw NnfParseError(line_no, "edge count does not match header");
  if (declared_nodes == 0) throw NnfParseError(line_no, "empty NNF");
  return dag;
}

NnfDag parse_nnf(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_nnf(in);
}

NnfDag prune_unreachable(const NnfDag& dag) {
  std::vector<char> live(dag.node_count(), 0);
  live[dag.root()] = 1;
  for (NodeId id = dag.root() + 1; id-- > 0;) {
    if (!live[id]) continue;
    for (NodeId c : dag.node(id).children) live[c] = 1;
  }
  std::vector<NodeId> remap(dag.node_count(), 0);
  NnfDag out(dag.num_vars());
  for (NodeId id = 0; id <= dag.root(); ++id) {
    if (!live[id]) continue;
    NnfNode n = dag.node(id);
    for (NodeId& c : n.children) c = remap[c];
    switch (n.kind) {
      case NodeKind::literal: remap[id] = out.add_literal(n.lit); break;
      case NodeKind::conj: remap[id] = out.add_and(std::move(n.children)); break;
      case NodeKind::disj: remap[id] = out.add_or(std::move(n.children), n.decision); break;
    }
  }
  return out;
}

void write_nnf(std::ostream& out, const NnfDag& dag) {
  if (dag.node_count() == 0) throw std::invalid_argument("cannot write an empty NNF");
  if (dag.root() + 1 != dag.node_count()) {
    write_nnf(out, prune_unreachable(dag));
    return;
  }
  out << "nnf " << dag.node_count() << ' ' << dag.edge_count() << ' ' << dag.num_vars() << '\n';
  for (const NnfNode& n : dag.nodes()) {
    switch (n.kind) {
      case NodeKind::literal: out << "L " << n.lit; break;
      case NodeKind::conj: out << "A " << n.children.size(); break;
      case NodeKind::disj: out << "O " << n.decision << ' ' << n.children.size(); break;
    }
    for (NodeId c : n.children) out << ' ' << c;
    out << '\n';
  }
}

std::string print_nnf(const NnfDag& dag) {
  std::ostringstream out;
  write_nnf(out, dag);
  return out.str();
}

}  // namespace lpc
