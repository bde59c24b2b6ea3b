#include <doctest.h>

#include <random>
#include <sstream>

#include "lpcount/completion.hpp"
#include "lpcount/nnf.hpp"
#include "support/support.hpp"

using namespace lpc;

namespace {

CnfDoc random_cnf(std::mt19937_64& rng, std::uint32_t max_vars) {
  std::uniform_int_distribution<std::uint32_t> vars_dist(1, max_vars);
  CnfDoc cnf;
  cnf.num_vars = vars_dist(rng);
  for (std::uint32_t v = 0; v < cnf.num_vars; ++v) cnf.var_kind.push_back(AtomId{v});
  std::uniform_int_distribution<std::size_t> clauses(0, cnf.num_vars * 3);
  std::uniform_int_distribution<int> width(1, 3);
  std::uniform_int_distribution<std::uint32_t> var(1, cnf.num_vars);
  std::bernoulli_distribution sign(0.5);
  const std::size_t m = clauses(rng);
  for (std::size_t i = 0; i < m; ++i) {
    Clause c;
    for (int k = width(rng); k > 0; --k) {
      auto v = static_cast<CnfLiteral>(var(rng));
      c.push_back(sign(rng) ? v : -v);
    }
    cnf.clauses.push_back(c);
  }
  return cnf;
}

}  // namespace

TEST_CASE("figure DAG parses and prints back") {
  NnfDag dag = parse_nnf(test::kFigureNnf);
  CHECK(dag.node_count() == 14);
  CHECK(dag.edge_count() == 13);
  CHECK(dag.num_vars() == 7);
  CHECK(dag.root() == 13);
  CHECK(dag.node(6).kind == NodeKind::disj);
  CHECK(dag.node(6).decision == 6);
  CHECK(print_nnf(dag) == test::kFigureNnf);
  CHECK(parse_nnf(print_nnf(dag)) == dag);
  CHECK(validate(dag).sd_dnnf());
  CHECK(brute_force_count(dag) == 2);
}

TEST_CASE("single literal file") {
  NnfDag dag = parse_nnf("nnf 1 0 1\nL 1\n");
  CHECK(dag.node_count() == 1);
  CHECK(brute_force_count(dag) == 1);
  CHECK(validate(dag).sd_dnnf());
}

TEST_CASE("malformed NNF is rejected") {
  CHECK_THROWS_AS(parse_nnf("nnf 2 1 1\nL 1\nA 1 5\n"), NnfParseError);  // dangling child
  CHECK_THROWS_AS(parse_nnf("nnf 2 1 1\nA 1 1\nL 1\n"), NnfParseError);  // forward reference
  CHECK_THROWS_AS(parse_nnf("nnf 1 0 1\nL 2\n"), NnfParseError);         // variable out of range
  CHECK_THROWS_AS(parse_nnf("nnf 2 0 1\nL 1\n"), NnfParseError);         // node count mismatch
  CHECK_THROWS_AS(parse_nnf("nnf 2 5 1\nL 1\nA 1 0\n"), NnfParseError);  // edge count mismatch
  CHECK_THROWS_AS(parse_nnf("cnf 1 0 1\nL 1\n"), NnfParseError);
  CHECK_THROWS_AS(parse_nnf(""), NnfParseError);
}

TEST_CASE("validation flags each property") {
  // a and a: not decomposable
  NnfReport r1 = validate(parse_nnf("nnf 2 2 1\nL 1\nA 2 0 0\n"));
  CHECK_FALSE(r1.decomposable);
  // a or b: neither deterministic nor smooth
  NnfReport r2 = validate(parse_nnf("nnf 3 2 2\nL 1\nL 2\nO 0 2 0 1\n"));
  CHECK_FALSE(r2.deterministic);
  CHECK_FALSE(r2.smooth);
  // (a and b) or a: deterministic? no, a and b implies a; also not smooth
  NnfReport r3 = validate(parse_nnf("nnf 4 4 2\nL 1\nL 2\nA 2 0 1\nO 0 2 2 0\n"));
  CHECK_FALSE(r3.smooth);
  // (a and b) or (-a): deterministic, not smooth
  NnfReport r4 = validate(parse_nnf("nnf 5 4 2\nL 1\nL 2\nA 2 0 1\nL -1\nO 1 2 2 3\n"));
  CHECK(r4.decomposable);
  CHECK(r4.deterministic);
  CHECK_FALSE(r4.smooth);
}

TEST_CASE("smoothing adds tautologies without changing the count") {
  NnfDag dag = parse_nnf("nnf 5 4 2\nL 1\nL 2\nA 2 0 1\nL -1\nO 1 2 2 3\n");
  CHECK(brute_force_count(dag) == 3);
  NnfDag s = smooth(dag);
  CHECK(validate(s).sd_dnnf());
  CHECK(brute_force_count(s) == 3);
  CHECK(smooth(s) == s);

  NnfDag fig = parse_nnf(test::kFigureNnf);
  CHECK(smooth(fig) == fig);

  // smoothing also extends the root to every variable: a over {a, b}
  NnfDag partial = parse_nnf("nnf 1 0 2\nL 1\n");
  CHECK(brute_force_count(partial) == 2);
  NnfDag full = smooth(partial);
  CHECK(validate(full).sd_dnnf());
  CHECK(brute_force_count(full) == 2);
}

TEST_CASE("pruning drops unreachable nodes") {
  NnfDag dag = parse_nnf("nnf 3 1 2\nL 2\nL 1\nA 1 1\n");
  NnfDag p = prune_unreachable(dag);
  CHECK(p.node_count() == 2);
  CHECK(p.root() == 1);
  CHECK(brute_force_count(p) == brute_force_count(dag));
}

TEST_CASE("constants") {
  NnfDag f = NnfDag::constant(3, false);
  CHECK(f.is_false());
  CHECK(brute_force_count(f) == 0);
  NnfDag t = NnfDag::constant(2, true);
  CHECK_FALSE(t.is_false());
  CHECK(brute_force_count(t) == 4);
}

TEST_CASE("compiler: empty, unsatisfiable and trivial inputs") {
  CnfDoc empty;
  empty.num_vars = 2;
  empty.var_kind = {AtomId{0}, AtomId{1}};
  NnfDag e = compile(empty);
  CHECK(validate(e).sd_dnnf());
  CHECK(brute_force_count(e) == 4);

  CnfDoc unsat = empty;
  unsat.clauses = {{1}, {-1}};
  CHECK(compile(unsat).is_false());

  CnfDoc none;
  NnfDag z = compile(none);
  CHECK(brute_force_count(z) == 1);
}

TEST_CASE("compiler output is an sd-DNNF with the right count") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    CnfDoc cnf = random_cnf(rng, 20);
    for (VarOrder order : {VarOrder::index, VarOrder::min_fill}) {
      NnfDag dag = compile(cnf, {order, kDefaultNodeBudget});
      CHECK(dag.num_vars() == cnf.num_vars);
      NnfReport r = validate(dag);
      CHECK(r.decomposable);
      CHECK(r.deterministic);
      CHECK(r.smooth);
      CHECK(brute_force_count(dag) == test::dpll_count(cnf));
    }
  }
}

TEST_CASE("compiler on completions of the examples") {
  for (const char* name : {"pi1.lp", "pi2.lp", "pi3.lp", "pi4.lp"}) {
    CnfDoc cnf = build_completion(test::load_program(name));
    NnfDag dag = compile(cnf);
    CHECK(validate(dag).sd_dnnf());
    CHECK(brute_force_count(dag) == test::dpll_count(cnf));
  }
}

TEST_CASE("variable orders are permutations") {
  std::mt19937_64 rng(43);
  CnfDoc cnf = random_cnf(rng, 15);
  for (VarOrder order : {VarOrder::index, VarOrder::min_fill}) {
    auto o = variable_order(cnf, order);
    std::sort(o.begin(), o.end());
    std::vector<std::uint32_t> expect(cnf.num_vars);
    for (std::uint32_t v = 0; v < cnf.num_vars; ++v) expect[v] = v + 1;
    CHECK(o == expect);
  }
}

TEST_CASE("compiler node budget") {
  CnfDoc cnf = build_completion(parse_program(test::queens_program(5)));
  CHECK_THROWS_AS(compile(cnf, {VarOrder::index, 10}), CompileBudgetError);
}

TEST_CASE("write and read through streams") {
  NnfDag dag = compile(build_completion(test::load_program("pi3.lp")));
  std::stringstream s;
  write_nnf(s, dag);
  CHECK(read_nnf(s) == dag);
}
