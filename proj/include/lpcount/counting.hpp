#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpcount/nnf.hpp"
#include "lpcount/program.hpp"

namespace lpc {

using Count = mpz_class;

std::string to_string(const Count& c);

struct EvalStats {
  std::size_t nodes_visited = 0;
  bool wide = false;  // fell back to arbitrary precision
};

struct SizeReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
};

class NotSmoothError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Counting graph over a validated sd-DNNF. Literal leaves are worth 1 (0 when
/// contradicted by an assumption), disjunctions sum and conjunctions multiply.
class CountingGraph {
 public:
  /// `var_atoms[v-1]` is the program atom of variable v, or nullopt for an auxiliary.
  /// Throws NotSmoothError unless the DAG is a smooth deterministic decomposable NNF
  /// whose root mentions every variable.
  CountingGraph(NnfDag dag, std::vector<std::optional<AtomId>> var_atoms, std::size_t atom_count);

  const NnfDag& dag() const { return dag_; }
  const std::vector<std::optional<AtomId>>& var_atoms() const { return var_atoms_; }
  std::size_t atom_count() const { return atom_count_; }

  /// One bottom-up pass; inconsistent assumptions give 0 without traversal.
  Count evaluate(const AssumptionSet& assumptions, EvalStats* stats = nullptr) const;
  SizeReport size_report() const { return {dag_.node_count(), dag_.edge_count()}; }

 private:
  NnfDag dag_;
  std::vector<std::optional<AtomId>> var_atoms_;
  std::size_t atom_count_;
};

struct CompressedNode {
  NodeKind kind = NodeKind::literal;
  Literal lit;                           // literal nodes: a program literal
  std::vector<std::uint32_t> children;  // empty conjunction = 1, empty disjunction = 0

  friend bool operator==(const CompressedNode&, const CompressedNode&) = default;
};

struct CompressStats {
  std::size_t traversals = 0;
  std::size_t ignored = 0;
  std::size_t absorbed = 0;
};

/// Counting graph without auxiliary-variable leaves and without single-child
/// internal nodes. Evaluates to the same value as its source under any
/// assumption set over program atoms.
class CompressedGraph {
 public:
  CompressedGraph() = default;

  static CompressedGraph compress(const CountingGraph& g, CompressStats* stats = nullptr);

  const std::vector<CompressedNode>& nodes() const { return nodes_; }
  std::uint32_t root() const { return root_; }
  /// Original node id of each retained node.
  const std::vector<NodeId>& provenance() const { return provenance_; }
  std::size_t atom_count() const { return atom_count_; }

  Count evaluate(const AssumptionSet& assumptions, EvalStats* stats = nullptr) const;
  SizeReport size_report() const;

  void write(std::ostream& out) const;
  static CompressedGraph read(std::istream& in);

  friend bool operator==(const CompressedGraph&, const CompressedGraph&) = default;

 private:
  std::vector<CompressedNode> nodes_;
  std::vector<NodeId> provenance_;
  std::uint32_t root_ = 0;
  std::size_t atom_count_ = 0;
};

/// Reusable evaluation buffers for repeated counts on one compressed graph.
/// Not thread-safe; use one per thread.
class Evaluator {
 public:
  explicit Evaluator(const CompressedGraph& g) : graph_(&g) {}
  Count operator()(const AssumptionSet& assumptions, EvalStats* stats = nullptr);
  Count operator()(std::span<const Literal> literals, EvalStats* stats = nullptr);

 private:
  const CompressedGraph* graph_;
  std::vector<char> blocked_;
  std::vector<std::uint64_t> narrow_;
  std::vector<Count> wide_;
};

}  // namespace lpc
