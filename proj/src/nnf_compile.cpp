#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "lpcount/nnf.hpp"

namespace lpc {

CompileBudgetError::CompileBudgetError(std::size_t budget)
    : std::runtime_error("compilation exceeded the node budget of " + std::to_string(budget)) {}

namespace {

std::uint32_t var_of(CnfLiteral l) { return static_cast<std::uint32_t>(l < 0 ? -l : l); }

struct VectorHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (std::int32_t x : v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

class Compiler {
 public:
  static constexpr NodeId kFalse = static_cast<NodeId>(-1);

  Compiler(const CnfDoc& cnf, const CompileOptions& options)
      : dag_(cnf.num_vars), budget_(options.node_budget), value_(cnf.num_vars + 1, 0), rank_(cnf.num_vars + 1, 0) {
    auto order = variable_order(cnf, options.order);
    for (std::uint32_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
  }

  NnfDag run(const std::vector<Clause>& input) {
    std::vector<Clause> clauses;
    for (Clause c : input) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      bool tautology = false;
      for (std::size_t i = 0; i + 1 < c.size() && !tautology; ++i) {
        tautology = std::binary_search(c.begin() + static_cast<std::ptrdiff_t>(i) + 1, c.end(), -c[i]);
      }
      if (!tautology) clauses.push_back(std::move(c));
    }
    NodeId root = formula(std::move(clauses));
    if (root == kFalse) return NnfDag::constant(dag_.num_vars(), false);
    dag_.set_root(root);
    return prune_unreachable(smooth(dag_));
  }

 private:
  // Unit propagation followed by component decomposition.
  NodeId formula(std::vector<Clause> clauses) {
    std::vector<std::uint32_t> trail;
    auto undo = [&] {
      for (std::uint32_t v : trail) value_[v] = 0;
    };
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<Clause> next;
      next.reserve(clauses.size());
      for (Clause& c : clauses) {
        Clause open;
        bool satisfied = false;
        for (CnfLiteral l : c) {
          std::int8_t v = value_[var_of(l)];
          if (v == 0) {
            open.push_back(l);
          } else if ((v > 0) == (l > 0)) {
            satisfied = true;
            break;
          }
        }
        if (satisfied) continue;
        if (open.empty()) {
          undo();
          return kFalse;
        }
        if (open.size() == 1) {
          CnfLiteral u = open[0];
          if (value_[var_of(u)] == 0) {
            value_[var_of(u)] = u > 0 ? 1 : -1;
            trail.push_back(var_of(u));
            changed = true;
          }
          continue;
        }
        next.push_back(std::move(open));
      }
      clauses = std::move(next);
    }

    std::vector<NodeId> parts;
    for (std::uint32_t v : trail) parts.push_back(literal(value_[v] > 0 ? static_cast<CnfLiteral>(v) : -static_cast<CnfLiteral>(v)));

    for (auto& comp : components(std::move(clauses))) {
      NodeId n = component(std::move(comp));
      if (n == kFalse) {
        undo();
        return kFalse;
      }
      parts.push_back(n);
    }
    undo();
    if (parts.size() == 1) return parts[0];
    return conj(std::move(parts));
  }

  std::vector<std::vector<Clause>> components(std::vector<Clause> clauses) {
    if (clauses.empty()) return {};
    std::unordered_map<std::uint32_t, std::uint32_t> parent;
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t v) {
      auto it = parent.find(v);
      if (it == parent.end()) {
        parent.emplace(v, v);
        return v;
      }
      std::uint32_t r = v;
      while (parent[r] != r) r = parent[r];
      while (parent[v] != r) {
        std::uint32_t next = parent[v];
        parent[v] = r;
        v = next;
      }
      return r;
    };
    for (const Clause& c : clauses) {
      std::uint32_t a = find(var_of(c[0]));
      for (std::size_t i = 1; i < c.size(); ++i) {
        std::uint32_t b = find(var_of(c[i]));
        if (a != b) parent[b] = a;
      }
    }
    // ordered by first clause so node creation is deterministic
    std::map<std::uint32_t, std::vector<Clause>> groups;
    for (Clause& c : clauses) groups[find(var_of(c[0]))].push_back(std::move(c));
    std::vector<std::vector<Clause>> out;
    for (auto& [_, g] : groups) out.push_back(std::move(g));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
  }

  NodeId component(std::vector<Clause> clauses) {
    for (Clause& c : clauses) std::sort(c.begin(), c.end());
    std::sort(clauses.begin(), clauses.end());
    std::vector<std::int32_t> key;
    for (const Clause& c : clauses) {
      key.insert(key.end(), c.begin(), c.end());
      key.push_back(0);
    }
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    std::uint32_t pick = 0;
    for (const Clause& c : clauses) {
      for (CnfLiteral l : c) {
        std::uint32_t v = var_of(l);
        if (pick == 0 || rank_[v] < rank_[pick]) pick = v;
      }
    }
    auto branch = [&](CnfLiteral l) {
      std::vector<Clause> with = clauses;
      with.push_back({l});
      return formula(std::move(with));
    };
    auto x = static_cast<CnfLiteral>(pick);
    NodeId hi = branch(x);
    NodeId lo = branch(-x);
    // each branch asserts its decision literal through unit propagation
    NodeId result;
    if (hi == kFalse && lo == kFalse) {
      result = kFalse;
    } else if (hi == kFalse) {
      result = lo;
    } else if (lo == kFalse) {
      result = hi;
    } else {
      result = disj({hi, lo}, pick);
    }
    cache_.emplace(std::move(key), result);
    return result;
  }

  NodeId literal(CnfLiteral l) {
    auto it = literals_.find(l);
    if (it != literals_.end()) return it->second;
    check_budget();
    NodeId id = dag_.add_literal(l);
    literals_.emplace(l, id);
    return id;
  }

  NodeId conj(std::vector<NodeId> children) {
    std::sort(children.begin(), children.end());
    return intern(NodeKind::conj, std::move(children), 0);
  }

  NodeId disj(std::vector<NodeId> children, std::uint32_t decision) {
    return intern(NodeKind::disj, std::move(children), decision);
  }

  NodeId intern(NodeKind kind, std::vector<NodeId> children, std::uint32_t decision) {
    std::vector<std::int32_t> key;
    key.reserve(children.size() + 2);
    key.push_back(kind == NodeKind::conj ? -1 : -2);
    key.push_back(static_cast<std::int32_t>(decision));
    for (NodeId c : children) key.push_back(static_cast<std::int32_t>(c));
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    check_budget();
    NodeId id = kind == NodeKind::conj ? dag_.add_and(std::move(children)) : dag_.add_or(std::move(children), decision);
    unique_.emplace(std::move(key), id);
    return id;
  }

  void check_budget() const {
    if (dag_.node_count() >= budget_) throw CompileBudgetError(budget_);
  }

  NnfDag dag_;
  std::size_t budget_;
  std::vector<std::int8_t> value_;
  std::vector<std::uint32_t> rank_;
  std::unordered_map<CnfLiteral, NodeId> literals_;
  std::unordered_map<std::vector<std::int32_t>, NodeId, VectorHash> unique_;
  std::unordered_map<std::vector<std::int32_t>, NodeId, VectorHash> cache_;
};

// Greedy min-fill elimination on the primal graph; variables eliminated last are decided first.
std::vector<std::uint32_t> min_fill_order(const CnfDoc& cnf) {
  const std::uint32_t n = cnf.num_vars;
  std::vector<std::set<std::uint32_t>> adj(n + 1);
  for (const Clause& c : cnf.clauses) {
    for (CnfLiteral a : c) {
      for (CnfLiteral b : c) {
        if (var_of(a) != var_of(b)) adj[var_of(a)].insert(var_of(b));
      }
    }
  }
  std::vector<char> done(n + 1, 0);
  std::vector<std::uint32_t> elimination;
  for (std::uint32_t step = 0; step < n; ++step) {
    std::uint32_t best = 0;
    std::size_t best_fill = 0;
    for (std::uint32_t v = 1; v <= n; ++v) {
      if (done[v]) continue;
      std::size_t fill = 0;
      for (auto i = adj[v].begin(); i != adj[v].end(); ++i) {
        for (auto j = std::next(i); j != adj[v].end(); ++j) {
          if (!adj[*i].count(*j)) ++fill;
        }
      }
      if (best == 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    done[best] = 1;
    elimination.push_back(best);
    for (std::uint32_t a : adj[best]) {
      for (std::uint32_t b : adj[best]) {
        if (a != b) adj[a].insert(b);
      }
      adj[a].erase(best);
    }
    adj[best].clear();
  }
  std::reverse(elimination.begin(), elimination.end());
  return elimination;
}

}  // namespace

std::vector<std::uint32_t> variable_order(const CnfDoc& cnf, VarOrder order) {
  if (order == VarOrder::min_fill) return min_fill_order(cnf);
  std::vector<std::uint32_t> out(cnf.num_vars);
  std::iota(out.begin(), out.end(), 1U);
  return out;
}

NnfDag compile(const CnfDoc& cnf, const CompileOptions& options) {
  Compiler c(cnf, options);
  return c.run(cnf.clauses);
}

}  // namespace lpc
