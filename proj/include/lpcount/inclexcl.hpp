#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpcount/counting.hpp"
#include "lpcount/depgraph.hpp"

namespace lpc {

enum class Bound { exact, upper, lower };

const char* to_string(Bound b);

struct LevelRecord {
  std::size_t depth = 0;
  std::uint64_t terms = 0;    // combinations evaluated on the graph
  std::uint64_t skipped = 0;  // combinations with inconsistent literals
  Count partial;              // a_depth
};

struct RefinementTrace {
  /// a_0 .. a_k for every level actually processed.
  std::vector<Count> partials;
  std::vector<LevelRecord> levels;  // depths 1..k
  std::uint64_t evaluations_performed = 0;
  std::uint64_t evaluations_skipped = 0;
  /// Depth i with a_i = a_{i+1}.
  std::optional<std::size_t> terminated_at;
  std::size_t requested_depth = 0;
  /// Depth after clamping and optional rounding.
  std::size_t target_depth = 0;
  Bound bound = Bound::upper;
  /// Non-tight program refined against an empty catalog: the count is only the supported count.
  bool warning = false;
  /// L itself contradicts; nothing was evaluated.
  bool inconsistent = false;
  std::string note;

  const Count& count() const { return partials.back(); }
  /// Number of levels processed (d' of the cost model).
  std::size_t effective_depth() const { return levels.size(); }
};

inline constexpr std::uint64_t kDefaultTermBudget = 50'000'000;

struct RefineOptions {
  /// Round an odd depth up so refinement ends on an addition.
  bool round_odd_depth = false;
  /// Cap on sum_{i<=d'} C(n,i); checked before each level, so early termination can stay under it.
  std::uint64_t term_budget = kDefaultTermBudget;
  unsigned threads = 1;
  /// Tightness of the program the catalog was built from.
  bool program_tight = false;
};

class RefineBudgetError : public std::runtime_error {
 public:
  RefineBudgetError(std::uint64_t required, std::uint64_t budget);
  std::uint64_t required() const { return required_; }

 private:
  std::uint64_t required_;
};

/// Saturating binomial sum sum_{1<=i<=d} C(n,i).
std::uint64_t term_count(std::size_t n, std::size_t d);

/// Inclusion-exclusion over unsupported constraints. `depth` nullopt means the full
/// catalog size. Each term counts the graph under L plus the literals of one
/// combination of constraints; combinations that contradict themselves or L count 0
/// and are skipped. Stops early once two consecutive partial sums agree.
RefinementTrace refine(const CompressedGraph& g, const CycleCatalog& catalog, const AssumptionSet& assumptions,
                       std::optional<std::size_t> depth, const RefineOptions& options = {});

/// Keeps only the cycles whose constraint literals are consistent with L.
CycleCatalog restrict_catalog(const CycleCatalog& catalog, const AssumptionSet& assumptions);

/// Full-depth refinement on a complete catalog. Throws std::invalid_argument otherwise.
Count exact_count(const CompressedGraph& g, const CycleCatalog& catalog, const AssumptionSet& assumptions,
                  const RefineOptions& options = {});

/// "depth i: terms=<k> skipped=<s> partial=<a_i>" per level, then "count=<v> bound=<b>".
void write_trace(std::ostream& out, const RefinementTrace& trace);

}  // namespace lpc
