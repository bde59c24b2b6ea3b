#include "lpcount/oracle.hpp"

#include <algorithm>

namespace lpc::oracle {

namespace {

using Mask = std::uint32_t;

struct MaskRule {
  bool constraint;
  Mask head;
  Mask pos;
  Mask neg;
};

std::vector<MaskRule> to_masks(const Program& p) {
  std::vector<MaskRule> out;
  out.reserve(p.rules().size());
  for (const Rule& r : p.rules()) {
    MaskRule m{r.is_constraint(), 0, 0, 0};
    if (r.head) m.head = Mask{1} << *r.head;
    for (AtomId a : r.pos_body) m.pos |= Mask{1} << a;
    for (AtomId a : r.neg_body) m.neg |= Mask{1} << a;
    out.push_back(m);
  }
  return out;
}

void guard(const Program& p) {
  if (p.atom_count() > kMaxAtoms) throw SizeGuardError(p.atom_count());
}

bool body_holds(const MaskRule& r, Mask interp) {
  return (r.pos & ~interp) == 0 && (r.neg & interp) == 0;
}

bool supported(const std::vector<MaskRule>& rules, Mask interp) {
  Mask derived = 0;
  for (const MaskRule& r : rules) {
    if (!body_holds(r, interp)) continue;
    if (r.constraint) return false;
    derived |= r.head;
  }
  return derived == interp;
}

bool stable(const std::vector<MaskRule>& rules, Mask interp) {
  // constraints of the reduct must hold in interp
  for (const MaskRule& r : rules) {
    if (r.constraint && body_holds(r, interp)) return false;
  }
  Mask lm = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const MaskRule& r : rules) {
      if (r.constraint || (r.neg & interp) != 0) continue;
      if ((r.pos & ~lm) == 0 && (lm & r.head) == 0) {
        lm |= r.head;
        changed = true;
      }
    }
  }
  return lm == interp;
}

Interpretation from_mask(Mask m, std::size_t n) {
  Interpretation out;
  for (AtomId a = 0; a < n; ++a) {
    if (m & (Mask{1} << a)) out.push_back(a);
  }
  return out;
}

Mask to_mask(const Interpretation& interp) {
  Mask m = 0;
  for (AtomId a : interp) m |= Mask{1} << a;
  return m;
}

template <class Pred>
std::vector<Interpretation> enumerate(const Program& p, Pred pred) {
  guard(p);
  auto rules = to_masks(p);
  std::size_t n = p.atom_count();
  std::vector<Interpretation> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (pred(rules, static_cast<Mask>(m))) out.push_back(from_mask(static_cast<Mask>(m), n));
  }
  return out;
}

}  // namespace

SizeGuardError::SizeGuardError(std::size_t atoms)
    : std::length_error("oracle enumeration limited to " + std::to_string(kMaxAtoms) + " atoms, program has " +
                        std::to_string(atoms)) {}

Program gl_reduct(const Program& p, const Interpretation& interp) {
  Program out;
  for (const std::string& n : p.names()) out.intern(n);
  for (const Rule& r : p.rules()) {
    bool blocked = std::any_of(r.neg_body.begin(), r.neg_body.end(), [&](AtomId a) {
      return std::binary_search(interp.begin(), interp.end(), a);
    });
    if (blocked) continue;
    out.add_rule(Rule{r.head, r.pos_body, {}});
  }
  return out;
}

Interpretation least_model(const Program& negation_free) {
  std::vector<char> in(negation_free.atom_count(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : negation_free.rules()) {
      if (!r.head || in[*r.head]) continue;
      if (std::all_of(r.pos_body.begin(), r.pos_body.end(), [&](AtomId a) { return in[a] != 0; })) {
        in[*r.head] = 1;
        changed = true;
      }
    }
  }
  Interpretation out;
  for (AtomId a = 0; a < in.size(); ++a) {
    if (in[a]) out.push_back(a);
  }
  return out;
}

bool is_answer_set_by_minimality(const Program& p, const Interpretation& interp) {
  guard(p);
  auto reduct = to_masks(gl_reduct(p, interp));
  auto satisfies = [&](Mask m) {
    for (const MaskRule& r : reduct) {
      if ((r.pos & ~m) != 0) continue;
      if (r.constraint || (m & r.head) == 0) return false;
    }
    return true;
  };
  Mask full = to_mask(interp);
  if (!satisfies(full)) return false;
  // every proper subset of interp must fail
  for (Mask sub = (full - 1) & full;; sub = (sub - 1) & full) {
    if (sub != full && satisfies(sub)) return false;
    if (sub == 0) break;
  }
  return true;
}

std::vector<Interpretation> enumerate_answer_sets(const Program& p) { return enumerate(p, stable); }

std::vector<Interpretation> enumerate_supported_models(const Program& p) { return enumerate(p, supported); }

std::uint64_t count_under(const Program& p, const AssumptionSet& assumptions, Semantics semantics) {
  guard(p);
  if (!assumptions.consistent()) return 0;
  Mask must = 0;
  Mask must_not = 0;
  for (const Literal& l : assumptions.literals()) (l.positive ? must : must_not) |= Mask{1} << l.atom;
  auto rules = to_masks(p);
  std::size_t n = p.atom_count();
  std::uint64_t count = 0;
  for (std::uint64_t m64 = 0; m64 < (std::uint64_t{1} << n); ++m64) {
    auto m = static_cast<Mask>(m64);
    if ((m & must) != must || (m & must_not) != 0) continue;
    bool ok = semantics == Semantics::answer ? stable(rules, m) : supported(rules, m);
    if (ok) ++count;
  }
  return count;
}

}  // namespace lpc::oracle
