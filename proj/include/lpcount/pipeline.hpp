#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpcount/counting.hpp"
#include "lpcount/depgraph.hpp"
#include "lpcount/inclexcl.hpp"
#include "lpcount/nnf.hpp"

namespace lpc {

struct PipelineOptions {
  CycleMode cycles = CycleMode::simple;
  std::size_t cycle_cap = kDefaultCycleCap;
  std::size_t node_budget = kDefaultNodeBudget;
  VarOrder order = VarOrder::index;
  /// Use this NNF (over the completion's variables) instead of the internal compiler.
  std::optional<std::string> nnf_file;
  /// Keep the smoothed sd-DNNF in the artifact (not serialized).
  bool keep_nnf = false;
};

/// Wall-clock seconds per offline phase.
struct PhaseTimings {
  double parse = 0;
  double normalize = 0;
  double completion = 0;
  double compile = 0;  // sd-DNNF construction, including smoothing
  double graph = 0;    // counting graph validation and compression
  double cycles = 0;
};

struct CompiledArtifact {
  std::string digest;  // hex SHA-256 of the program text
  /// Atom names of the normalized program; the first `original_atoms` are the input's.
  std::vector<std::string> atom_names;
  std::size_t original_atoms = 0;
  std::size_t rule_count = 0;
  bool tight = true;
  std::uint32_t cnf_vars = 0;
  std::size_t cnf_clauses = 0;
  SizeReport nnf_size;
  CompressStats compress_stats;
  Count supported_count;
  PhaseTimings timings;
  CycleCatalog catalog;
  CompressedGraph graph;
  std::shared_ptr<const NnfDag> nnf;

  SizeReport compressed_size() const { return graph.size_report(); }
};

class DigestMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string program_digest(std::string_view text);

/// Parse, normalize supports, complete, compile, smooth, compress and catalog cycles.
CompiledArtifact compile_program(std::string_view text, const PipelineOptions& options = {});

void save_artifact(std::ostream& out, const CompiledArtifact& artifact);
CompiledArtifact load_artifact(std::istream& in);
/// Throws DigestMismatch unless the artifact was compiled from exactly `text`.
void verify_digest(const CompiledArtifact& artifact, std::string_view text);

RefinementTrace count(const CompiledArtifact& artifact, const AssumptionSet& assumptions,
                      std::optional<std::size_t> depth, RefineOptions options = {});

struct Facet {
  AtomId atom = 0;
  std::string name;
  Count count_true;
  Count count_false;
  Bound bound_true = Bound::exact;
  Bound bound_false = Bound::exact;
  /// count_true / (count_true + count_false), 0 when both are 0.
  double ratio_true = 0;
};

/// Counts under L plus a and under L plus not a for every input atom a not mentioned in L.
/// Terms run concurrently over the shared graph with `threads` workers.
std::vector<Facet> compute_facets(const CompiledArtifact& artifact, const AssumptionSet& assumptions,
                                  std::optional<std::size_t> depth, RefineOptions options = {},
                                  unsigned threads = 0);

}  // namespace lpc
