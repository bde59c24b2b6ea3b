#pragma once

// Shared test helpers: program generators and reference counters that do not
// depend on the library's compiler, counting graph or cycle enumeration.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpcount/completion.hpp"
#include "lpcount/depgraph.hpp"
#include "lpcount/nnf.hpp"
#include "lpcount/program.hpp"

#ifndef LPCOUNT_TEST_DATA
#define LPCOUNT_TEST_DATA "tests/data"
#endif

namespace lpc::test {

inline std::string data_path(const std::string& name) { return std::string(LPCOUNT_TEST_DATA) + "/" + name; }

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name), std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Program load_program(const std::string& name) { return parse_program(read_data(name)); }

struct GenParams {
  std::size_t max_atoms = 10;
  std::size_t max_rules = 20;
  /// Restrict positive bodies to lower atom ids, which keeps the program tight.
  bool tight = false;
  double constraint_ratio = 0.1;
};

/// Random ground normal program in the input syntax.
inline std::string random_program_text(std::mt19937_64& rng, const GenParams& gp) {
  std::uniform_int_distribution<std::size_t> atoms_dist(1, gp.max_atoms);
  const std::size_t n = atoms_dist(rng);
  std::uniform_int_distribution<std::size_t> rules_dist(1, gp.max_rules);
  const std::size_t m = rules_dist(rng);
  std::uniform_int_distribution<std::size_t> atom(0, n - 1);
  std::uniform_int_distribution<int> body_len(0, 3);
  std::bernoulli_distribution negative(0.4);
  std::bernoulli_distribution constraint(gp.constraint_ratio);
  auto name = [](std::size_t a) { return "p" + std::to_string(a); };

  std::ostringstream out;
  for (std::size_t r = 0; r < m; ++r) {
    const bool is_constraint = constraint(rng);
    const std::size_t head = atom(rng);
    std::vector<std::string> body;
    int len = body_len(rng);
    if (is_constraint && len == 0) len = 1;
    for (int i = 0; i < len; ++i) {
      std::size_t b = atom(rng);
      if (negative(rng)) {
        body.push_back("not " + name(b));
      } else if (!gp.tight || is_constraint || b < head) {
        body.push_back(name(b));
      } else {
        body.push_back("not " + name(b));
      }
    }
    if (!is_constraint) out << name(head);
    if (!body.empty() || is_constraint) {
      out << " :- ";
      for (std::size_t i = 0; i < body.size(); ++i) out << (i ? ", " : "") << body[i];
    }
    out << ".\n";
  }
  return out.str();
}

/// Random consistent assumption set over atoms [0, atoms).
inline AssumptionSet random_assumptions(std::mt19937_64& rng, std::size_t atoms, std::size_t max_size = 3) {
  if (atoms == 0) return {};
  std::uniform_int_distribution<std::size_t> size(0, std::min(max_size, atoms));
  std::vector<AtomId> pool(atoms);
  for (std::size_t i = 0; i < atoms; ++i) pool[i] = static_cast<AtomId>(i);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::bernoulli_distribution sign(0.5);
  std::vector<Literal> lits;
  const std::size_t k = size(rng);
  for (std::size_t i = 0; i < k; ++i) lits.push_back(Literal{pool[i], sign(rng)});
  return AssumptionSet(std::move(lits));
}

/// Exact model count of a CNF by plain DPLL splitting with unit propagation.
class DpllCounter {
 public:
  explicit DpllCounter(const CnfDoc& cnf) : num_vars_(cnf.num_vars), clauses_(cnf.clauses) {}

  std::uint64_t count() {
    std::vector<std::int8_t> value(num_vars_ + 1, 0);
    return run(value);
  }

 private:
  std::uint64_t run(std::vector<std::int8_t>& value) {
    std::vector<std::uint32_t> trail;
    auto restore = [&] {
      for (auto v : trail) value[v] = 0;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (const Clause& c : clauses_) {
        int open = 0;
        CnfLiteral last = 0;
        bool sat = false;
        for (CnfLiteral l : c) {
          auto v = static_cast<std::uint32_t>(std::abs(l));
          if (value[v] == 0) {
            ++open;
            last = l;
          } else if ((value[v] > 0) == (l > 0)) {
            sat = true;
            break;
          }
        }
        if (sat) continue;
        if (open == 0) {
          restore();
          return 0;
        }
        if (open == 1) {
          auto v = static_cast<std::uint32_t>(std::abs(last));
          value[v] = last > 0 ? 1 : -1;
          trail.push_back(v);
          changed = true;
        }
      }
    }
    std::uint32_t pick = 0;
    for (const Clause& c : clauses_) {
      bool sat = false;
      std::uint32_t cand = 0;
      for (CnfLiteral l : c) {
        auto v = static_cast<std::uint32_t>(std::abs(l));
        if (value[v] == 0) {
          cand = v;
        } else if ((value[v] > 0) == (l > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat && cand) {
        pick = cand;
        break;
      }
    }
    std::uint64_t result;
    if (pick == 0) {
      std::uint32_t free = 0;
      for (std::uint32_t v = 1; v <= num_vars_; ++v) free += value[v] == 0;
      result = std::uint64_t{1} << free;
    } else {
      value[pick] = 1;
      result = run(value);
      value[pick] = -1;
      result += run(value);
      value[pick] = 0;
    }
    restore();
    return result;
  }

  std::uint32_t num_vars_;
  std::vector<Clause> clauses_;
};

inline std::uint64_t dpll_count(const CnfDoc& cnf) { return DpllCounter(cnf).count(); }

/// Vertex sets of closed walks, found by exploring (position, visited-set) states
/// from each start vertex. Exponential; intended for graphs of at most ~10 vertices.
inline std::set<AtomSet> closed_walk_sets(const DepGraph& g) {
  const std::size_t n = g.vertex_count();
  std::set<AtomSet> out;
  for (AtomId s = 0; s < n; ++s) {
    std::set<std::pair<AtomId, std::uint32_t>> seen;
    std::vector<std::pair<AtomId, std::uint32_t>> stack{{s, 1U << s}};
    seen.insert(stack.back());
    while (!stack.empty()) {
      auto [v, mask] = stack.back();
      stack.pop_back();
      for (AtomId w : g.successors(v)) {
        std::uint32_t next = mask | (1U << w);
        if (w == s) {
          AtomSet set;
          for (AtomId a = 0; a < n; ++a) {
            if (mask >> a & 1U) set.push_back(a);
          }
          out.insert(set);
        }
        if (seen.insert({w, next}).second) stack.push_back({w, next});
      }
    }
  }
  return out;
}

/// The sd-DNNF ((x3 and -c) or (-x3 and c)) and (-x1 and -x2 and -x5 and a and b)
/// over a=1, b=2, c=3, x1=4, x2=5, x3=6, x5=7: 14 nodes, 13 edges.
inline const char* kFigureNnf =
    "nnf 14 13 7\n"
    "L 6\n"   // 0  x3
    "L -3\n"  // 1  -c
    "L -6\n"  // 2  -x3
    "L 3\n"   // 3  c
    "A 2 0 1\n"
    "A 2 2 3\n"
    "O 6 2 4 5\n"
    "L -4\n"  // 7  -x1
    "L -5\n"  // 8  -x2
    "L -7\n"  // 9  -x5
    "L 2\n"   // 10 b
    "L 1\n"   // 11 a
    "A 5 7 8 9 10 11\n"
    "A 2 6 12\n";

/// Variable map of the figure DAG: three program atoms, four auxiliaries.
inline std::vector<std::optional<AtomId>> figure_var_atoms() {
  return {AtomId{0}, AtomId{1}, AtomId{2}, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
}

/// n-queens as a ground normal program: a guess per square via an even loop
/// through negation, and constraints for rows, columns and diagonals.
inline std::string queens_program(int n) {
  std::ostringstream out;
  auto q = [](int i, int j) { return "q" + std::to_string(i) + "_" + std::to_string(j); };
  auto nq = [](int i, int j) { return "n" + std::to_string(i) + "_" + std::to_string(j); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out << q(i, j) << " :- not " << nq(i, j) << ".\n" << nq(i, j) << " :- not " << q(i, j) << ".\n";
    }
  }
  for (int i = 0; i < n; ++i) {
    out << ":- ";
    for (int j = 0; j < n; ++j) out << (j ? ", " : "") << nq(i, j);
    out << ".\n";
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          if (std::make_pair(i, j) >= std::make_pair(k, l)) continue;
          bool attack = i == k || j == l || i - j == k - l || i + j == k + l;
          if (attack) out << ":- " << q(i, j) << ", " << q(k, l) << ".\n";
        }
      }
    }
  }
  return out.str();
}

}  // namespace lpc::test
