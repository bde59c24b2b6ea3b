#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpcount/program.hpp"

namespace lpc {

/// Sorted, duplicate-free set of atoms.
using AtomSet = std::vector<AtomId>;

/// Positive dependency graph: an edge (b, h) for every b in B+(r), h = H(r).
class DepGraph {
 public:
  explicit DepGraph(std::size_t vertices) : succ_(vertices) {}

  void add_edge(AtomId from, AtomId to);
  std::size_t vertex_count() const { return succ_.size(); }
  std::size_t edge_count() const;
  const std::vector<AtomId>& successors(AtomId v) const { return succ_.at(v); }
  bool has_edge(AtomId from, AtomId to) const;
  std::vector<std::pair<AtomId, AtomId>> edges() const;

  /// Strongly connected component index per vertex (Tarjan, reverse topological numbering).
  std::vector<std::size_t> components() const;
  /// Whether the subgraph induced by `vertices` is strongly connected and has an edge.
  bool induces_cycle(const AtomSet& vertices) const;

 private:
  std::vector<std::vector<AtomId>> succ_;  // sorted
};

DepGraph build_depgraph(const Program& p);

/// Acyclic, counting self-loops as cycles.
bool is_tight(const DepGraph& g);

enum class CycleMode { simple, exhaustive };

const char* to_string(CycleMode m);
CycleMode parse_cycle_mode(std::string_view s);

inline constexpr std::size_t kDefaultCycleCap = 10000;

class CycleBudgetError : public std::runtime_error {
 public:
  CycleBudgetError(std::size_t cap, std::size_t partial);
  std::size_t partial_count() const { return partial_; }

 private:
  std::size_t partial_;
};

struct CycleSets {
  CycleMode mode = CycleMode::simple;
  /// Vertex sets in lexicographic order of their sorted ids.
  std::vector<AtomSet> sets;
  /// True when `sets` is known to contain every closed-walk vertex set.
  bool complete = false;
};

/// simple: vertex sets of simple directed cycles (Johnson's circuit search).
/// exhaustive: every vertex set whose induced subgraph is strongly connected with an edge.
/// Throws CycleBudgetError once more than `cap` distinct sets would be produced.
CycleSets enumerate_cycles(const DepGraph& g, CycleMode mode, std::size_t cap = kDefaultCycleCap);

class NormalizationRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Atoms in B+(r) of every rule r with H(r) in C and B+(r) disjoint from C.
/// Throws NormalizationRequired if such a rule has a body of two or more literals.
AtomSet external_supports(const Program& p, const AtomSet& cycle);

/// Body literals of the constraint forbidding `cycle` true while every support is false:
/// the cycle atoms positive, the supports negative.
std::vector<Literal> unsupported_constraint(const AtomSet& cycle, const AtomSet& supports);

struct SupportNormalization {
  struct Rewrite {
    std::size_t original_rule;  // index in the input program
    std::size_t aux_rule;       // index of `aux :- body.` in the output
    std::size_t link_rule;      // index of `head :- aux.` in the output
  };
  std::vector<AtomId> added_atoms;
  std::vector<Rewrite> rewrites;
};

/// Splits every rule that externally supports some cycle through its head and whose
/// body is not a single positive atom into `aux :- body.` and `head :- aux.`, so that
/// each external support is one atom. Supported models correspond one-to-one.
std::pair<Program, SupportNormalization> normalize_supports(const Program& p);

struct CycleEntry {
  AtomSet atoms;
  AtomSet supports;
  /// B(lambda(C)): atoms positive, supports negative, in literal order.
  std::vector<Literal> constraint;
};

struct CycleCatalog {
  CycleMode mode = CycleMode::simple;
  bool complete = false;
  std::vector<CycleEntry> cycles;

  std::size_t size() const { return cycles.size(); }
  bool empty() const { return cycles.empty(); }
};

/// Cycles of `p` with supports and constraints. `p` should already be normalized.
CycleCatalog build_catalog(const Program& p, CycleMode mode, std::size_t cap = kDefaultCycleCap);
CycleCatalog build_catalog(const Program& p, const CycleSets& sets);

/// One line per cycle: "c <atoms...> | <supports...>".
void write_catalog(std::ostream& out, const CycleCatalog& catalog, const std::vector<std::string>& atom_names);
CycleCatalog read_catalog(std::istream& in, const std::vector<std::string>& atom_names, CycleMode mode,
                          bool complete);

}  // namespace lpc
