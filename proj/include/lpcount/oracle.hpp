#pragma once

// Brute-force reference semantics. Everything here enumerates 2^n
// interpretations and is only meant for small programs and tests.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpcount/program.hpp"

namespace lpc::oracle {

/// Sorted set of true atoms.
using Interpretation = std::vector<AtomId>;

inline constexpr std::size_t kMaxAtoms = 24;

class SizeGuardError : public std::length_error {
 public:
  explicit SizeGuardError(std::size_t atoms);
};

enum class Semantics { answer, supported };

Program gl_reduct(const Program& p, const Interpretation& interp);

/// Least model of a negation-free program by naive fixpoint iteration.
/// Constraints are ignored; negative bodies must be empty.
Interpretation least_model(const Program& negation_free);

/// Stability by definition: `interp` satisfies the reduct and no proper subset does.
bool is_answer_set_by_minimality(const Program& p, const Interpretation& interp);

std::vector<Interpretation> enumerate_answer_sets(const Program& p);
std::vector<Interpretation> enumerate_supported_models(const Program& p);

/// Models of the chosen semantics that agree with every literal in `assumptions`.
/// An inconsistent assumption set yields 0.
std::uint64_t count_under(const Program& p, const AssumptionSet& assumptions, Semantics semantics);

}  // namespace lpc::oracle
