#include "lpcount/inclexcl.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <ostream>

namespace lpc {

const char* to_string(Bound b) {
  switch (b) {
    case Bound::exact: return "exact";
    case Bound::upper: return "upper";
    case Bound::lower: return "lower";
  }
  return "?";
}

RefineBudgetError::RefineBudgetError(std::uint64_t required, std::uint64_t budget)
    : std::runtime_error("refinement needs " +
                         (required == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                                 : std::to_string(required)) +
                         " terms, budget is " + std::to_string(budget)),
      required_(required) {}

__extension__ using Wide = unsigned __int128;

std::uint64_t term_count(std::size_t n, std::size_t d) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  d = std::min(d, n);
  std::uint64_t total = 0;
  std::uint64_t c = 1;  // C(n, i)
  for (std::size_t i = 1; i <= d; ++i) {
    // C(n,i) = C(n,i-1) * (n-i+1) / i, exact at every step in 128-bit.
    Wide next = static_cast<Wide>(c) * (n - i + 1) / i;
    if (next > kMax) return kMax;
    c = static_cast<std::uint64_t>(next);
    if (total > kMax - c) return kMax;
    total += c;
  }
  return total;
}

namespace {

constexpr std::size_t kBatch = 2048;

class TermRunner {
 public:
  TermRunner(const CompressedGraph& g, unsigned threads) {
    threads = std::max(1U, threads);
    for (unsigned t = 0; t < threads; ++t) evaluators_.emplace_back(g);
  }

  Count sum(const std::vector<std::vector<Literal>>& batch) {
    if (batch.empty()) return 0;
    const std::size_t workers = std::min(evaluators_.size(), batch.size());
    if (workers <= 1) return slice(0, batch, 0, batch.size());
    std::vector<std::future<Count>> parts;
    const std::size_t step = (batch.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t lo = w * step;
      std::size_t hi = std::min(batch.size(), lo + step);
      parts.push_back(std::async(std::launch::async, [this, &batch, w, lo, hi] { return slice(w, batch, lo, hi); }));
    }
    Count total = 0;
    for (auto& p : parts) total += p.get();
    return total;
  }

 private:
  Count slice(std::size_t worker, const std::vector<std::vector<Literal>>& batch, std::size_t lo, std::size_t hi) {
    Count s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += evaluators_[worker](std::span<const Literal>(batch[i]));
    return s;
  }

  std::vector<Evaluator> evaluators_;
};

}  // namespace

RefinementTrace refine(const CompressedGraph& g, const CycleCatalog& catalog, const AssumptionSet& assumptions,
                       std::optional<std::size_t> depth, const RefineOptions& options) {
  const std::size_t n = catalog.size();
  RefinementTrace trace;
  trace.requested_depth = depth.value_or(n);
  std::size_t d = trace.requested_depth;
  if (options.round_odd_depth && d % 2 == 1) ++d;
  d = std::min(d, n);
  trace.target_depth = d;
  trace.warning = catalog.empty() && !catalog.complete && !options.program_tight;

  if (!assumptions.consistent()) {
    trace.partials.push_back(0);
    trace.terminated_at = 0;
    trace.bound = Bound::exact;
    trace.inconsistent = true;
    trace.note = "inconsistent assumptions";
    return trace;
  }

  TermRunner runner(g, options.threads);
  Count count = runner.sum({assumptions.literals()});
  trace.partials.push_back(count);

  std::vector<std::uint32_t> stamp(2 * g.atom_count(), 0);
  std::uint32_t generation = 0;
  Count previous = 0;  // c of the early-exit test; a_0 = 0 stops immediately

  for (std::size_t i = 1; i <= d; ++i) {
    if (count == previous) {
      trace.terminated_at = i >= 2 ? i - 2 : 0;
      break;
    }
    previous = count;
    if (term_count(n, i) > options.term_budget) throw RefineBudgetError(term_count(n, d), options.term_budget);

    LevelRecord level;
    level.depth = i;
    Count level_sum = 0;
    std::vector<std::vector<Literal>> batch;
    std::vector<std::size_t> idx(i);
    for (std::size_t k = 0; k < i; ++k) idx[k] = k;
    for (;;) {
      ++generation;
      std::vector<Literal> lits = assumptions.literals();
      bool consistent = true;
      for (Literal l : lits) stamp[l.code()] = generation;
      for (std::size_t k = 0; k < i && consistent; ++k) {
        for (Literal l : catalog.cycles[idx[k]].constraint) {
          if (stamp[(~l).code()] == generation) {
            consistent = false;
            break;
          }
          if (stamp[l.code()] != generation) {
            stamp[l.code()] = generation;
            lits.push_back(l);
          }
        }
      }
      if (consistent) {
        ++level.terms;
        batch.push_back(std::move(lits));
        if (batch.size() == kBatch) {
          level_sum += runner.sum(batch);
          batch.clear();
        }
      } else {
        ++level.skipped;
      }
      // next combination in lexicographic order
      std::size_t k = i;
      while (k > 0 && idx[k - 1] == n - i + (k - 1)) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < i; ++j) idx[j] = idx[j - 1] + 1;
    }
    level_sum += runner.sum(batch);

    if (i % 2 == 1) {
      count -= level_sum;
    } else {
      count += level_sum;
    }
    level.partial = count;
    trace.evaluations_performed += level.terms;
    trace.evaluations_skipped += level.skipped;
    trace.levels.push_back(level);
    trace.partials.push_back(count);
  }

  // An agreement on the last processed level is detected at the boundary as well.
  const std::size_t k = trace.levels.size();
  if (!trace.terminated_at && k >= 1 && trace.partials[k] == trace.partials[k - 1]) trace.terminated_at = k - 1;
  if (!trace.terminated_at && trace.partials.front() == 0) trace.terminated_at = 0;

  const bool finished = trace.terminated_at.has_value() || k == n;
  if (trace.partials.front() == 0) {
    trace.bound = Bound::exact;
  } else if (finished) {
    if (catalog.complete) {
      trace.bound = Bound::exact;
    } else {
      trace.bound = Bound::upper;
      trace.note = "cycle catalog lists simple cycles only; value may over-count";
    }
  } else {
    trace.bound = k % 2 == 0 ? Bound::upper : Bound::lower;
    if (!catalog.complete) trace.note = "cycle catalog lists simple cycles only; bound is not guaranteed";
  }
  if (trace.warning && trace.partials.front() != 0) {
    trace.bound = Bound::upper;
    trace.note = "non-tight program without a cycle catalog; count is the supported-model count";
  }
  return trace;
}

CycleCatalog restrict_catalog(const CycleCatalog& catalog, const AssumptionSet& assumptions) {
  CycleCatalog out;
  out.mode = catalog.mode;
  out.complete = catalog.complete;
  for (const CycleEntry& e : catalog.cycles) {
    bool keep = std::none_of(e.constraint.begin(), e.constraint.end(),
                             [&](Literal l) { return assumptions.contains(~l); });
    if (keep) out.cycles.push_back(e);
  }
  return out;
}

Count exact_count(const CompressedGraph& g, const CycleCatalog& catalog, const AssumptionSet& assumptions,
                  const RefineOptions& options) {
  if (!catalog.complete) throw std::invalid_argument("exact count needs a complete cycle catalog");
  return refine(g, catalog, assumptions, std::nullopt, options).count();
}

void write_trace(std::ostream& out, const RefinementTrace& trace) {
  out << "depth 0: terms=" << (trace.inconsistent ? 0 : 1) << " skipped=" << (trace.inconsistent ? 1 : 0)
      << " partial=" << to_string(trace.partials.front()) << '\n';
  for (const LevelRecord& l : trace.levels) {
    out << "depth " << l.depth << ": terms=" << l.terms << " skipped=" << l.skipped
        << " partial=" << to_string(l.partial) << '\n';
  }
  out << "count=" << to_string(trace.count()) << " bound=" << to_string(trace.bound) << '\n';
}

}  // namespace lpc
