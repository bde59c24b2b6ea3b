#include <doctest.h>

#include <algorithm>
#include <random>

#include "lpcount/depgraph.hpp"
#include "lpcount/oracle.hpp"
#include "support/support.hpp"

using namespace lpc;
using oracle::Interpretation;

namespace {

Interpretation atoms(const Program& p, std::initializer_list<const char*> names) {
  Interpretation i;
  for (const char* n : names) i.push_back(*p.find(n));
  std::sort(i.begin(), i.end());
  return i;
}

std::vector<Interpretation> sorted(std::vector<Interpretation> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("reduct drops rules blocked by the interpretation") {
  Program p2 = test::load_program("pi2.lp");
  Program r = oracle::gl_reduct(p2, atoms(p2, {"a", "b", "c"}));
  // d :- not c is dropped; c :- not d keeps an empty body
  CHECK(r.print() == "a :- b.\nb :- a.\na :- c.\nc.\n");
  Program r2 = oracle::gl_reduct(p2, atoms(p2, {"c", "d"}));
  CHECK(r2.print() == "a :- b.\nb :- a.\na :- c.\n");

  Program p1 = test::load_program("pi1.lp");
  CHECK(oracle::gl_reduct(p1, {}).rules() == p1.rules());
}

TEST_CASE("answer sets of the examples") {
  Program p1 = test::load_program("pi1.lp");
  CHECK(oracle::enumerate_answer_sets(p1) == std::vector<Interpretation>{atoms(p1, {"a", "b"})});

  Program p2 = test::load_program("pi2.lp");
  CHECK(sorted(oracle::enumerate_answer_sets(p2)) ==
        sorted({atoms(p2, {"a", "b", "c"}), atoms(p2, {"d"})}));

  Program p4 = test::load_program("pi4.lp");
  auto sp = oracle::enumerate_supported_models(p4);
  auto as = oracle::enumerate_answer_sets(p4);
  std::erase(sp, atoms(p4, {"a", "b", "c", "d", "e", "h"}));
  CHECK(sorted(sp) == sorted(as));
}

TEST_CASE("supported models of the examples") {
  Program p1 = test::load_program("pi1.lp");
  CHECK(sorted(oracle::enumerate_supported_models(p1)) ==
        sorted({atoms(p1, {"a", "b"}), atoms(p1, {"a", "b", "c"})}));

  Program p3 = test::load_program("pi3.lp");
  CHECK(sorted(oracle::enumerate_supported_models(p3)) ==
        sorted({atoms(p3, {"d"}), atoms(p3, {"d", "e", "f"}), atoms(p3, {"a", "b", "d"}),
                atoms(p3, {"a", "b", "c"}), atoms(p3, {"a", "b", "c", "e", "f"}),
                atoms(p3, {"a", "b", "d", "e", "f"})}));

  Program p4 = test::load_program("pi4.lp");
  CHECK(sorted(oracle::enumerate_supported_models(p4)) ==
        sorted({atoms(p4, {"e", "h"}), atoms(p4, {"a", "b", "c", "d", "g", "h"}),
                atoms(p4, {"a", "b", "c", "d", "f", "g"}), atoms(p4, {"a", "b", "c", "d", "e", "h"}),
                atoms(p4, {"a", "b", "c", "d", "e", "f"})}));
}

TEST_CASE("counts under assumptions") {
  using oracle::Semantics;
  Program p3 = test::load_program("pi3.lp");
  CHECK(oracle::count_under(p3, AssumptionSet::parse(p3, "d"), Semantics::supported) == 4);
  CHECK(oracle::count_under(p3, AssumptionSet::parse(p3, "d"), Semantics::answer) == 1);
  Program p4 = test::load_program("pi4.lp");
  CHECK(oracle::count_under(p4, AssumptionSet::parse(p4, "-a,b"), Semantics::answer) == 0);
  CHECK(oracle::count_under(p4, AssumptionSet::parse(p4, "a,-a"), Semantics::supported) == 0);
}

TEST_CASE("size guard") {
  std::string text;
  for (int i = 0; i < 25; ++i) text += "p" + std::to_string(i) + " :- not p" + std::to_string(i) + "x.\n";
  Program p = parse_program(text.substr(0, text.find("p12")));  // 24 atoms: allowed
  CHECK(p.atom_count() == 24);
  CHECK_NOTHROW(oracle::count_under(p, {}, oracle::Semantics::answer));
  Program big = parse_program(text);
  CHECK_THROWS_AS(oracle::enumerate_answer_sets(big), oracle::SizeGuardError);
  CHECK_THROWS_AS(oracle::enumerate_supported_models(big), oracle::SizeGuardError);
}

TEST_CASE("answer sets are supported models; equal on tight programs") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    test::GenParams gp;
    gp.tight = i % 2 == 0;
    Program p = parse_program(test::random_program_text(rng, gp));
    auto as = sorted(oracle::enumerate_answer_sets(p));
    auto sp = sorted(oracle::enumerate_supported_models(p));
    for (const auto& m : as) CHECK(std::binary_search(sp.begin(), sp.end(), m));
    if (is_tight(build_depgraph(p))) CHECK(as == sp);
  }
}

TEST_CASE("least-model stability agrees with the minimality definition") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Program p = parse_program(test::random_program_text(rng, {}));
    auto as = sorted(oracle::enumerate_answer_sets(p));
    const std::size_t n = p.atom_count();
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      Interpretation interp;
      for (AtomId a = 0; a < n; ++a) {
        if (mask >> a & 1U) interp.push_back(a);
      }
      bool by_least = std::binary_search(as.begin(), as.end(), interp);
      bool violates_constraint = false;
      for (const Rule& r : p.rules()) {
        if (!r.is_constraint()) continue;
        bool body = std::all_of(r.pos_body.begin(), r.pos_body.end(), [&](AtomId x) { return mask >> x & 1U; }) &&
                    std::none_of(r.neg_body.begin(), r.neg_body.end(), [&](AtomId x) { return mask >> x & 1U; });
        violates_constraint |= body;
      }
      CHECK(by_least == (!violates_constraint && oracle::is_answer_set_by_minimality(p, interp)));
    }
  }
}
