#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lpcount/oracle.hpp"
#include "lpcount/pipeline.hpp"
#include "support/support.hpp"

using namespace lpc;

namespace {

const Facet& facet(const std::vector<Facet>& fs, std::string_view name) {
  for (const Facet& f : fs) {
    if (f.name == name) return f;
  }
  throw std::out_of_range(std::string(name));
}

}  // namespace

TEST_CASE("digest is SHA-256 of the text") {
  CHECK(program_digest("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(program_digest("a.") != program_digest("a. "));
  CHECK(program_digest("a.").size() == 64);
}

TEST_CASE("compile the examples") {
  struct Golden {
    const char* file;
    int supported;
    int answers;
    bool tight;
  };
  for (Golden g : {Golden{"pi1.lp", 2, 1, false}, Golden{"pi2.lp", 3, 2, false}, Golden{"pi3.lp", 6, 2, false},
                   Golden{"pi4.lp", 5, 4, false}}) {
    CAPTURE(g.file);
    PipelineOptions opts;
    opts.cycles = CycleMode::exhaustive;
    CompiledArtifact art = compile_program(test::read_data(g.file), opts);
    CHECK(art.supported_count == g.supported);
    CHECK(art.tight == g.tight);
    CHECK(art.compress_stats.traversals == 2);
    CHECK(art.compressed_size().node_count <= art.nnf_size.node_count);
    RefinementTrace t = count(art, {}, std::nullopt);
    CHECK(t.count() == g.answers);
    CHECK(t.bound == Bound::exact);
  }
}

TEST_CASE("normalized atoms follow the input atoms") {
  CompiledArtifact art = compile_program(test::read_data("pi4.lp"));
  CHECK(art.original_atoms == 8);
  CHECK(art.atom_names.size() == 10);
  CHECK(art.atom_names[8] == "b_r");
  CHECK(art.atom_names[9] == "d_r");
  CHECK(art.rule_count == 16);
}

TEST_CASE("artifact round-trip") {
  const std::string text = test::read_data("pi3.lp");
  CompiledArtifact art = compile_program(text);
  std::stringstream s;
  save_artifact(s, art);
  CHECK(s.str().substr(0, 4) == "CPCA");
  CompiledArtifact back = load_artifact(s);
  CHECK(back.digest == art.digest);
  CHECK(back.atom_names == art.atom_names);
  CHECK(back.graph == art.graph);
  CHECK(back.supported_count == art.supported_count);
  REQUIRE(back.catalog.size() == art.catalog.size());
  for (std::size_t i = 0; i < art.catalog.size(); ++i) {
    CHECK(back.catalog.cycles[i].constraint == art.catalog.cycles[i].constraint);
  }
  CHECK(count(back, AssumptionSet::parse(back.atom_names, "d"), 2).count() == 1);

  CHECK_NOTHROW(verify_digest(back, text));
  CHECK_THROWS_AS(verify_digest(back, text + "\n"), DigestMismatch);

  std::istringstream junk("CPCA but truncated");
  CHECK_THROWS(load_artifact(junk));
}

TEST_CASE("external NNF file") {
  const std::string text = test::read_data("pi2.lp");
  PipelineOptions keep;
  keep.keep_nnf = true;
  CompiledArtifact art = compile_program(text, keep);
  REQUIRE(art.nnf);
  auto path = std::filesystem::temp_directory_path() / "lpcount_test_external.nnf";
  {
    std::ofstream out(path);
    write_nnf(out, *art.nnf);
  }
  PipelineOptions ext;
  ext.nnf_file = path.string();
  CompiledArtifact again = compile_program(text, ext);
  CHECK(again.supported_count == 3);
  CHECK(count(again, {}, std::nullopt).count() == 2);

  {
    std::ofstream out(path);
    out << "nnf 1 0 1\nL 1\n";
  }
  CHECK_THROWS(compile_program(text, ext));
  std::filesystem::remove(path);
}

TEST_CASE("facets of the second example") {
  CompiledArtifact art = compile_program(test::read_data("pi2.lp"));
  auto fs = compute_facets(art, {}, std::nullopt);
  CHECK(fs.size() == 4);
  const Facet& a = facet(fs, "a");
  CHECK(a.count_true == 1);
  CHECK(a.count_false == 1);
  CHECK(a.bound_true == Bound::exact);
  CHECK(a.ratio_true == doctest::Approx(0.5));
  const Facet& d = facet(fs, "d");
  CHECK(d.count_true == 1);
  CHECK(d.count_false == 1);

  auto under = compute_facets(art, AssumptionSet::parse(art.atom_names, "d"), std::nullopt);
  CHECK(under.size() == 3);
  CHECK(facet(under, "a").count_true == 0);
  CHECK(facet(under, "a").ratio_true == 0);
  CHECK(facet(under, "c").count_false == 1);
}

TEST_CASE("depth-0 facets split the supported count") {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 40; ++i) {
    std::string text = test::random_program_text(rng, {8, 14});
    CompiledArtifact art = compile_program(text);
    Program p = parse_program(text);
    for (const Facet& f : compute_facets(art, {}, 0, {}, 2)) {
      CHECK(f.count_true + f.count_false == art.supported_count);
      CHECK(f.count_true == oracle::count_under(p, AssumptionSet({pos(f.atom)}), oracle::Semantics::supported));
    }
  }
}

TEST_CASE("pipeline counts match the oracle on random programs") {
  std::mt19937_64 rng(73);
  for (int i = 0; i < 100; ++i) {
    std::string text = test::random_program_text(rng, {});
    Program p = parse_program(text);
    PipelineOptions opts;
    opts.cycles = CycleMode::exhaustive;
    CompiledArtifact art = compile_program(text, opts);
    CHECK(art.supported_count == oracle::enumerate_supported_models(p).size());
    if (term_count(art.catalog.size(), art.catalog.size()) > 200000) continue;
    for (int j = 0; j < 5; ++j) {
      AssumptionSet l = test::random_assumptions(rng, p.atom_count());
      RefinementTrace t = count(art, l, std::nullopt);
      CHECK(t.bound == Bound::exact);
      CHECK(t.count() == oracle::count_under(p, l, oracle::Semantics::answer));
    }
  }
}
