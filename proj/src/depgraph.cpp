#include "lpcount/depgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace lpc {

void DepGraph::add_edge(AtomId from, AtomId to) {
  auto& s = succ_.at(from);
  if (to >= succ_.size()) throw std::out_of_range("edge target out of range");
  auto it = std::lower_bound(s.begin(), s.end(), to);
  if (it == s.end() || *it != to) s.insert(it, to);
}

std::size_t DepGraph::edge_count() const {
  std::size_t e = 0;
  for (const auto& s : succ_) e += s.size();
  return e;
}

bool DepGraph::has_edge(AtomId from, AtomId to) const {
  const auto& s = succ_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

std::vector<std::pair<AtomId, AtomId>> DepGraph::edges() const {
  std::vector<std::pair<AtomId, AtomId>> out;
  for (AtomId v = 0; v < succ_.size(); ++v) {
    for (AtomId w : succ_[v]) out.emplace_back(v, w);
  }
  return out;
}

std::vector<std::size_t> DepGraph::components() const {
  // iterative Tarjan
  const std::size_t n = succ_.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<AtomId> stack;
  std::vector<std::pair<AtomId, std::size_t>> call;
  std::size_t next_index = 0;
  std::size_t next_comp = 0;
  for (AtomId root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i == 0 && index[v] == unvisited) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (i < succ_[v].size()) {
        AtomId w = succ_[v][i++];
        if (index[w] == unvisited) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        AtomId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
      AtomId done = v;
      call.pop_back();
      if (!call.empty()) {
        AtomId parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

bool DepGraph::induces_cycle(const AtomSet& vertices) const {
  if (vertices.empty()) return false;
  if (vertices.size() == 1) return has_edge(vertices[0], vertices[0]);
  // reachability from the first vertex, along and against the edges
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(succ_.size(), 0);
    std::vector<AtomId> todo{vertices[0]};
    seen[vertices[0]] = 1;
    std::size_t count = 1;
    while (!todo.empty()) {
      AtomId v = todo.back();
      todo.pop_back();
      for (AtomId w : vertices) {
        if (seen[w]) continue;
        bool edge = forward ? has_edge(v, w) : has_edge(w, v);
        if (edge) {
          seen[w] = 1;
          ++count;
          todo.push_back(w);
        }
      }
    }
    return count == vertices.size();
  };
  return reach_all(true) && reach_all(false);
}

DepGraph build_depgraph(const Program& p) {
  DepGraph g(p.atom_count());
  for (const Rule& r : p.rules()) {
    if (!r.head) continue;
    for (AtomId b : r.pos_body) g.add_edge(b, *r.head);
  }
  return g;
}

bool is_tight(const DepGraph& g) {
  auto comp = g.components();
  std::vector<std::size_t> size(g.vertex_count(), 0);
  for (std::size_t c : comp) ++size[c];
  for (AtomId v = 0; v < g.vertex_count(); ++v) {
    if (size[comp[v]] > 1 || g.has_edge(v, v)) return false;
  }
  return true;
}

const char* to_string(CycleMode m) { return m == CycleMode::simple ? "simple" : "exhaustive"; }

CycleMode parse_cycle_mode(std::string_view s) {
  if (s == "simple") return CycleMode::simple;
  if (s == "exhaustive") return CycleMode::exhaustive;
  throw std::invalid_argument("unknown cycle mode '" + std::string(s) + "'");
}

CycleBudgetError::CycleBudgetError(std::size_t cap, std::size_t partial)
    : std::runtime_error("cycle budget exhausted: more than " + std::to_string(cap) + " cycles (" +
                         std::to_string(partial) + " enumerated)"),
      partial_(partial) {}

namespace {

bool intersects(const AtomSet& a, const AtomSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

AtomSet set_union(const AtomSet& a, const AtomSet& b) {
  AtomSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class SetFamily {
 public:
  explicit SetFamily(std::size_t cap) : cap_(cap) {}

  bool insert(AtomSet s) {
    if (sets_.count(s)) return false;
    if (sets_.size() >= cap_) throw CycleBudgetError(cap_, sets_.size());
    sets_.insert(std::move(s));
    return true;
  }
  bool contains(const AtomSet& s) const { return sets_.count(s) != 0; }
  std::vector<AtomSet> take() const { return {sets_.begin(), sets_.end()}; }

 private:
  std::size_t cap_;
  std::set<AtomSet> sets_;
};

// Johnson's elementary circuit enumeration, recording vertex sets only.
class CircuitSearch {
 public:
  CircuitSearch(const DepGraph& g, SetFamily& out) : g_(g), out_(out) {}

  void run() {
    const std::size_t n = g_.vertex_count();
    blocked_.assign(n, 0);
    blocked_by_.assign(n, {});
    in_scope_.assign(n, 0);
    for (AtomId s = 0; s < n; ++s) {
      // strongly connected component of s within vertices >= s
      DepGraph sub(n);
      for (AtomId v = s; v < n; ++v) {
        for (AtomId w : g_.successors(v)) {
          if (w >= s) sub.add_edge(v, w);
        }
      }
      auto comp = sub.components();
      std::fill(in_scope_.begin(), in_scope_.end(), 0);
      std::size_t scope_size = 0;
      for (AtomId v = s; v < n; ++v) {
        if (comp[v] == comp[s]) {
          in_scope_[v] = 1;
          ++scope_size;
        }
      }
      if (scope_size == 1 && !g_.has_edge(s, s)) continue;
      for (AtomId v = s; v < n; ++v) {
        blocked_[v] = 0;
        blocked_by_[v].clear();
      }
      start_ = s;
      circuit(s);
    }
  }

 private:
  bool circuit(AtomId v) {
    bool found = false;
    path_.push_back(v);
    blocked_[v] = 1;
    for (AtomId w : g_.successors(v)) {
      if (!in_scope_[w]) continue;
      if (w == start_) {
        AtomSet s(path_.begin(), path_.end());
        std::sort(s.begin(), s.end());
        out_.insert(std::move(s));
        found = true;
      } else if (!blocked_[w] && circuit(w)) {
        found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (AtomId w : g_.successors(v)) {
        if (!in_scope_[w]) continue;
        auto& b = blocked_by_[w];
        if (std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
      }
    }
    path_.pop_back();
    return found;
  }

  void unblock(AtomId v) {
    std::vector<AtomId> todo{v};
    while (!todo.empty()) {
      AtomId u = todo.back();
      todo.pop_back();
      if (!blocked_[u]) continue;
      blocked_[u] = 0;
      for (AtomId w : blocked_by_[u]) todo.push_back(w);
      blocked_by_[u].clear();
    }
  }

  const DepGraph& g_;
  SetFamily& out_;
  AtomId start_ = 0;
  std::vector<char> blocked_;
  std::vector<std::vector<AtomId>> blocked_by_;
  std::vector<char> in_scope_;
  std::vector<AtomId> path_;
};

// A family of simple-cycle vertex sets is already closed (contains every strongly
// connected vertex set) iff the union of any two overlapping members is a member.
bool closed_under_overlap(const std::vector<AtomSet>& sets, const SetFamily& family) {
  constexpr std::size_t pair_check_limit = 3000;
  if (sets.size() > pair_check_limit) return false;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (!intersects(sets[i], sets[j])) continue;
      if (!family.contains(set_union(sets[i], sets[j]))) return false;
    }
  }
  return true;
}

}  // namespace

CycleSets enumerate_cycles(const DepGraph& g, CycleMode mode, std::size_t cap) {
  SetFamily family(cap);
  CircuitSearch(g, family).run();
  std::vector<AtomSet> simple = family.take();
  CycleSets out;
  out.mode = mode;
  if (mode == CycleMode::simple) {
    out.complete = closed_under_overlap(simple, family);
    out.sets = std::move(simple);
    return out;
  }
  // Every strongly connected vertex set is a union of simple cycles that can be
  // added one at a time, each overlapping the union so far.
  std::deque<AtomSet> todo(simple.begin(), simple.end());
  while (!todo.empty()) {
    AtomSet s = std::move(todo.front());
    todo.pop_front();
    for (const AtomSet& z : simple) {
      if (!intersects(s, z) || std::includes(s.begin(), s.end(), z.begin(), z.end())) continue;
      AtomSet u = set_union(s, z);
      if (family.insert(u)) todo.push_back(std::move(u));
    }
  }
  out.sets = family.take();
  out.complete = true;
  return out;
}

AtomSet external_supports(const Program& p, const AtomSet& cycle) {
  auto in_cycle = [&](AtomId a) { return std::binary_search(cycle.begin(), cycle.end(), a); };
  AtomSet out;
  for (const Rule& r : p.rules()) {
    if (!r.head || !in_cycle(*r.head)) continue;
    if (std::any_of(r.pos_body.begin(), r.pos_body.end(), in_cycle)) continue;
    if (r.body_size() >= 2) {
      throw NormalizationRequired("rule for '" + p.name(*r.head) +
                                  "' supports a cycle through a multi-literal body; run normalize_supports first");
    }
    out.insert(out.end(), r.pos_body.begin(), r.pos_body.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Literal> unsupported_constraint(const AtomSet& cycle, const AtomSet& supports) {
  std::vector<Literal> out;
  out.reserve(cycle.size() + supports.size());
  for (AtomId a : cycle) out.push_back(pos(a));
  for (AtomId a : supports) out.push_back(neg(a));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Whether some cycle through `head` avoids every atom of `avoid`.
bool cycle_avoiding(const DepGraph& g, const std::vector<std::size_t>& comp, AtomId head, const AtomSet& avoid) {
  auto blocked = [&](AtomId v) { return std::binary_search(avoid.begin(), avoid.end(), v); };
  if (blocked(head)) return false;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<AtomId> todo;
  for (AtomId w : g.successors(head)) {
    if (w == head) return true;
    if (comp[w] == comp[head] && !blocked(w) && !seen[w]) {
      seen[w] = 1;
      todo.push_back(w);
    }
  }
  while (!todo.empty()) {
    AtomId v = todo.back();
    todo.pop_back();
    for (AtomId w : g.successors(v)) {
      if (w == head) return true;
      if (comp[w] == comp[head] && !blocked(w) && !seen[w]) {
        seen[w] = 1;
        todo.push_back(w);
      }
    }
  }
  return false;
}

std::string fresh_name(const Program& p, const std::string& base) {
  std::string name = base + "_r";
  for (int k = 2; p.find(name); ++k) name = base + "_r" + std::to_string(k);
  return name;
}

}  // namespace

std::pair<Program, SupportNormalization> normalize_supports(const Program& p) {
  DepGraph g = build_depgraph(p);
  auto comp = g.components();

  Program out;
  for (const std::string& n : p.names()) out.intern(n);
  SupportNormalization norm;
  for (std::size_t i = 0; i < p.rules().size(); ++i) {
    const Rule& r = p.rules()[i];
    bool single_positive = r.pos_body.size() == 1 && r.neg_body.empty();
    if (!r.head || single_positive || !cycle_avoiding(g, comp, *r.head, r.pos_body)) {
      out.add_rule(r);
      continue;
    }
    AtomId aux = out.intern(fresh_name(out, p.name(*r.head)));
    norm.added_atoms.push_back(aux);
    std::size_t aux_rule = out.rules().size();
    out.add_rule(Rule{aux, r.pos_body, r.neg_body});
    out.add_rule(Rule{r.head, {aux}, {}});
    norm.rewrites.push_back({i, aux_rule, aux_rule + 1});
  }
  return {std::move(out), std::move(norm)};
}

CycleCatalog build_catalog(const Program& p, CycleMode mode, std::size_t cap) {
  return build_catalog(p, enumerate_cycles(build_depgraph(p), mode, cap));
}

CycleCatalog build_catalog(const Program& p, const CycleSets& sets) {
  CycleCatalog cat;
  cat.mode = sets.mode;
  cat.complete = sets.complete;
  for (const AtomSet& c : sets.sets) {
    CycleEntry e;
    e.atoms = c;
    e.supports = external_supports(p, c);
    e.constraint = unsupported_constraint(e.atoms, e.supports);
    cat.cycles.push_back(std::move(e));
  }
  return cat;
}

void write_catalog(std::ostream& out, const CycleCatalog& catalog, const std::vector<std::string>& atom_names) {
  for (const CycleEntry& e : catalog.cycles) {
    out << 'c';
    for (AtomId a : e.atoms) out << ' ' << atom_names.at(a);
    out << " |";
    for (AtomId a : e.supports) out << ' ' << atom_names.at(a);
    out << '\n';
  }
}

CycleCatalog read_catalog(std::istream& in, const std::vector<std::string>& atom_names, CycleMode mode,
                          bool complete) {
  auto lookup = [&](const std::string& name) {
    auto it = std::find(atom_names.begin(), atom_names.end(), name);
    if (it == atom_names.end()) throw std::runtime_error("catalog names unknown atom '" + name + "'");
    return static_cast<AtomId>(it - atom_names.begin());
  };
  CycleCatalog cat;
  cat.mode = mode;
  cat.complete = complete;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok != "c") throw std::runtime_error("malformed catalog line: " + line);
    CycleEntry e;
    bool supports = false;
    while (ls >> tok) {
      if (tok == "|") {
        supports = true;
        continue;
      }
      (supports ? e.supports : e.atoms).push_back(lookup(tok));
    }
    if (!supports) throw std::runtime_error("catalog line without '|': " + line);
    std::sort(e.atoms.begin(), e.atoms.end());
    std::sort(e.supports.begin(), e.supports.end());
    e.constraint = unsupported_constraint(e.atoms, e.supports);
    cat.cycles.push_back(std::move(e));
  }
  return cat;
}

}  // namespace lpc
