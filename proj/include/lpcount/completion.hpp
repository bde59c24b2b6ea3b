#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lpcount/program.hpp"

namespace lpc {

/// DIMACS-style literal: +v / -v for variable v >= 1.
using CnfLiteral = std::int32_t;
using Clause = std::vector<CnfLiteral>;

/// Clause set with a variable table. Variables 1..atoms are program atoms in
/// id order; auxiliary (Tseitin) variables follow.
struct CnfDoc {
  std::uint32_t num_vars = 0;
  std::vector<Clause> clauses;
  /// Indexed by var-1: the program atom a variable stands for, or nullopt for auxiliaries.
  std::vector<std::optional<AtomId>> var_kind;

  bool is_program_var(std::uint32_t var) const { return var_kind.at(var - 1).has_value(); }
  std::uint32_t program_var_count() const;

  static std::uint32_t var_of(AtomId a) { return a + 1; }
  static CnfLiteral lit_of(Literal l) {
    auto v = static_cast<CnfLiteral>(var_of(l.atom));
    return l.positive ? v : -v;
  }
};

/// Clark's completion as CNF; models projected to program variables are exactly
/// the supported models, and every such model extends uniquely to the auxiliaries.
CnfDoc build_completion(const Program& p);

/// Adds one unit clause per assumption. Throws std::invalid_argument for an
/// inconsistent set.
CnfDoc apply_assumptions(const CnfDoc& cnf, const AssumptionSet& assumptions);

void write_dimacs(std::ostream& out, const CnfDoc& cnf);
/// Sidecar lines "v <var> <atom-name>" and "x <var>".
void write_var_map(std::ostream& out, const CnfDoc& cnf, const std::vector<std::string>& atom_names);

/// Reads a DIMACS CNF; every variable v is tagged as program atom v-1.
CnfDoc read_dimacs(std::istream& in);

}  // namespace lpc
