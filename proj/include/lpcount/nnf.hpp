#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpcount/completion.hpp"

namespace lpc {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { literal, conj, disj };

struct NnfNode {
  NodeKind kind = NodeKind::literal;
  CnfLiteral lit = 0;          // literal nodes
  std::uint32_t decision = 0;  // disjunctions: decision variable, 0 if unknown
  std::vector<NodeId> children;

  friend bool operator==(const NnfNode&, const NnfNode&) = default;
};

/// Rooted NNF DAG over variables 1..num_vars. Children always precede their
/// parent. An empty conjunction is true, an empty disjunction false.
class NnfDag {
 public:
  NnfDag() = default;
  explicit NnfDag(std::uint32_t num_vars) : num_vars_(num_vars) {}

  NodeId add_literal(CnfLiteral lit);
  NodeId add_and(std::vector<NodeId> children);
  NodeId add_or(std::vector<NodeId> children, std::uint32_t decision = 0);

  void set_root(NodeId root);
  NodeId root() const { return root_; }
  std::uint32_t num_vars() const { return num_vars_; }
  const std::vector<NnfNode>& nodes() const { return nodes_; }
  const NnfNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  /// |phi|: number of edges.
  std::size_t edge_count() const;

  static NnfDag constant(std::uint32_t num_vars, bool value);
  bool is_false() const;

  friend bool operator==(const NnfDag&, const NnfDag&) = default;

 private:
  NodeId push(NnfNode n);

  std::uint32_t num_vars_ = 0;
  std::vector<NnfNode> nodes_;
  NodeId root_ = 0;
};

class NnfParseError : public std::runtime_error {
 public:
  NnfParseError(std::size_t line, const std::string& what);
};

/// c2d exchange format: "nnf <nodes> <edges> <vars>", then one line per node
/// ("L <lit>", "A <c> <ids...>", "O <var> <c> <ids...>"); the last node is the root.
NnfDag parse_nnf(std::string_view text);
NnfDag read_nnf(std::istream& in);
void write_nnf(std::ostream& out, const NnfDag& dag);
std::string print_nnf(const NnfDag& dag);

struct NnfReport {
  bool decomposable = true;
  bool deterministic = true;
  bool smooth = true;

  bool sd_dnnf() const { return decomposable && deterministic && smooth; }
};

NnfReport validate(const NnfDag& dag);

/// Keeps the nodes reachable from the root, renumbered so the root comes last.
NnfDag prune_unreachable(const NnfDag& dag);

/// Adds (v or -v) gadgets so every disjunction's children, and the root, mention
/// the same variables. Leaves an already smooth DAG untouched.
NnfDag smooth(const NnfDag& dag);

/// Brute-force model count of the DAG over all num_vars variables (test aid, <= 24 vars).
std::uint64_t brute_force_count(const NnfDag& dag);

enum class VarOrder { index, min_fill };

inline constexpr std::size_t kDefaultNodeBudget = 10'000'000;

struct CompileOptions {
  VarOrder order = VarOrder::index;
  std::size_t node_budget = kDefaultNodeBudget;
};

class CompileBudgetError : public std::runtime_error {
 public:
  explicit CompileBudgetError(std::size_t budget);
};

/// Decision order over 1..num_vars.
std::vector<std::uint32_t> variable_order(const CnfDoc& cnf, VarOrder order);

/// Compiles a CNF into an equivalent smooth deterministic decomposable NNF by
/// decision splitting with unit propagation, component decomposition and
/// caching of residual components. Unsatisfiable input gives the false DAG.
NnfDag compile(const CnfDoc& cnf, const CompileOptions& options = {});

}  // namespace lpc
