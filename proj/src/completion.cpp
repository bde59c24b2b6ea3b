#include "lpcount/completion.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lpc {

std::uint32_t CnfDoc::program_var_count() const {
  std::uint32_t n = 0;
  for (const auto& k : var_kind) n += k.has_value() ? 1 : 0;
  return n;
}

namespace {

std::vector<CnfLiteral> body_literals(const Rule& r) {
  std::vector<CnfLiteral> lits;
  lits.reserve(r.body_size());
  for (AtomId a : r.pos_body) lits.push_back(CnfDoc::lit_of(pos(a)));
  for (AtomId a : r.neg_body) lits.push_back(CnfDoc::lit_of(neg(a)));
  return lits;
}

}  // namespace

CnfDoc build_completion(const Program& p) {
  CnfDoc cnf;
  auto n = static_cast<std::uint32_t>(p.atom_count());
  cnf.num_vars = n;
  for (AtomId a = 0; a < n; ++a) cnf.var_kind.emplace_back(a);

  std::vector<std::vector<const Rule*>> defining(n);
  for (const Rule& r : p.rules()) {
    if (r.head) defining[*r.head].push_back(&r);
  }

  auto new_aux = [&cnf]() {
    cnf.var_kind.emplace_back(std::nullopt);
    return static_cast<CnfLiteral>(++cnf.num_vars);
  };

  for (AtomId a = 0; a < n; ++a) {
    const CnfLiteral head = CnfDoc::lit_of(pos(a));
    const auto& rules = defining[a];
    bool has_fact = false;
    for (const Rule* r : rules) has_fact = has_fact || r->body_size() == 0;
    if (has_fact) {
      cnf.clauses.push_back({head});
      continue;
    }
    if (rules.empty()) {
      cnf.clauses.push_back({-head});
      continue;
    }
    std::vector<CnfLiteral> terms;
    for (const Rule* r : rules) {
      auto body = body_literals(*r);
      if (body.size() == 1) {
        terms.push_back(body.front());
        continue;
      }
      // x <-> conjunction of body
      CnfLiteral x = new_aux();
      Clause back{x};
      for (CnfLiteral l : body) {
        cnf.clauses.push_back({-x, l});
        back.push_back(-l);
      }
      cnf.clauses.push_back(std::move(back));
      terms.push_back(x);
    }
    Clause forward{-head};
    forward.insert(forward.end(), terms.begin(), terms.end());
    cnf.clauses.push_back(std::move(forward));
    for (CnfLiteral t : terms) cnf.clauses.push_back({head, -t});
  }

  for (const Rule& r : p.rules()) {
    if (!r.is_constraint()) continue;
    Clause c;
    for (CnfLiteral l : body_literals(r)) c.push_back(-l);
    cnf.clauses.push_back(std::move(c));
  }
  return cnf;
}

CnfDoc apply_assumptions(const CnfDoc& cnf, const AssumptionSet& assumptions) {
  if (!assumptions.consistent()) throw std::invalid_argument("inconsistent assumption set");
  CnfDoc out = cnf;
  for (const Literal& l : assumptions.literals()) {
    if (CnfDoc::var_of(l.atom) > cnf.num_vars || !cnf.is_program_var(CnfDoc::var_of(l.atom))) {
      throw std::invalid_argument("assumption on a non-program variable");
    }
    out.clauses.push_back({CnfDoc::lit_of(l)});
  }
  return out;
}

void write_dimacs(std::ostream& out, const CnfDoc& cnf) {
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const Clause& c : cnf.clauses) {
    for (CnfLiteral l : c) out << l << ' ';
    out << "0\n";
  }
}

void write_var_map(std::ostream& out, const CnfDoc& cnf, const std::vector<std::string>& atom_names) {
  for (std::uint32_t v = 1; v <= cnf.num_vars; ++v) {
    const auto& kind = cnf.var_kind[v - 1];
    if (kind) {
      out << "v " << v << ' ' << atom_names.at(*kind) << '\n';
    } else {
      out << "x " << v << '\n';
    }
  }
}

CnfDoc read_dimacs(std::istream& in) {
  CnfDoc cnf;
  std::string line;
  bool header = false;
  std::size_t declared_clauses = 0;
  Clause current;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      ls >> p >> fmt >> cnf.num_vars >> declared_clauses;
      if (!ls || fmt != "cnf") throw std::runtime_error("malformed DIMACS header: " + line);
      header = true;
      for (std::uint32_t v = 0; v < cnf.num_vars; ++v) cnf.var_kind.emplace_back(v);
      continue;
    }
    if (!header) throw std::runtime_error("DIMACS clause before header");
    CnfLiteral l = 0;
    while (ls >> l) {
      if (l == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (static_cast<std::uint32_t>(l < 0 ? -l : l) > cnf.num_vars) {
        throw std::runtime_error("DIMACS literal out of range: " + std::to_string(l));
      }
      current.push_back(l);
    }
  }
  if (!current.empty()) cnf.clauses.push_back(std::move(current));
  if (!header) throw std::runtime_error("missing DIMACS header");
  if (cnf.clauses.size() != declared_clauses) throw std::runtime_error("DIMACS clause count mismatch");
  return cnf;
}

}  // namespace lpc
