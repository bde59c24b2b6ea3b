// lpcount: compile ground normal programs once, then count answer sets under assumptions.

#include <httplib.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "lpcount/oracle.hpp"
#include "lpcount/pipeline.hpp"
#include "lpcount/service.hpp"

namespace {

using namespace lpc;
using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kBudget = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CompileFlags {
  std::string cycles = "simple";
  std::string compiler = "internal";
  std::string order = "index";
  std::size_t budget_nodes = kDefaultNodeBudget;
  std::size_t budget_cycles = kDefaultCycleCap;

  void add(CLI::App* app) {
    app->add_option("--cycles", cycles, "cycle catalog: simple or exhaustive")
        ->check(CLI::IsMember({"simple", "exhaustive"}));
    app->add_option("--compiler", compiler, "internal, or nnf-file=<path> for an external sd-DNNF");
    app->add_option("--order", order, "decision order of the internal compiler")
        ->check(CLI::IsMember({"index", "min-fill"}));
    app->add_option("--budget-nodes", budget_nodes, "node cap of the internal compiler");
    app->add_option("--budget-cycles", budget_cycles, "cap on catalogued cycles");
  }

  PipelineOptions options() const {
    PipelineOptions o;
    o.cycles = parse_cycle_mode(cycles);
    o.order = order == "min-fill" ? VarOrder::min_fill : VarOrder::index;
    o.node_budget = budget_nodes;
    o.cycle_cap = budget_cycles;
    if (compiler.starts_with("nnf-file=")) {
      o.nnf_file = compiler.substr(9);
    } else if (compiler != "internal") {
      throw CLI::ValidationError("--compiler", "expected internal or nnf-file=<path>");
    }
    return o;
  }
};

struct CountFlags {
  std::string assume;
  std::string depth = "full";
  bool end_on_add = false;
  unsigned threads = 1;
  std::uint64_t budget_terms = kDefaultTermBudget;
  std::string program;  // verify the artifact against this source

  void add(CLI::App* app) {
    app->add_option("--assume", assume, "assumption literals, e.g. a,-b");
    app->add_option("--depth", depth, "refinement depth (default: full)");
    app->add_flag("--end-on-add", end_on_add, "round an odd depth up so refinement ends on an addition");
    app->add_option("--threads", threads, "worker threads per refinement level");
    app->add_option("--budget-terms", budget_terms, "cap on inclusion-exclusion terms");
    app->add_option("--program", program, "program source the artifact must have been compiled from");
  }

  std::optional<std::size_t> parsed_depth() const {
    if (depth == "full") return std::nullopt;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(depth, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != depth.size() || depth.empty() || depth[0] == '-') {
      throw CLI::ValidationError("--depth", "expected a non-negative integer or 'full'");
    }
    return static_cast<std::size_t>(v);
  }

  RefineOptions refine() const {
    RefineOptions o;
    o.round_odd_depth = end_on_add;
    o.threads = threads;
    o.term_budget = budget_terms;
    return o;
  }
};

bool is_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && std::string(magic, 4) == "CPCA";
}

CompiledArtifact obtain(const std::string& input, const CompileFlags& cf, const CountFlags& kf) {
  if (is_artifact(input)) {
    std::ifstream in(input, std::ios::binary);
    CompiledArtifact art = load_artifact(in);
    if (!kf.program.empty()) verify_digest(art, read_file(kf.program));
    return art;
  }
  return compile_program(read_file(input), cf.options());
}

json timings_json(const PhaseTimings& t) {
  return {{"parse", t.parse},     {"normalize", t.normalize}, {"completion", t.completion},
          {"sd_dnnf", t.compile}, {"ccg", t.graph},           {"cycles", t.cycles}};
}

json trace_json(const RefinementTrace& t) {
  json levels = json::array();
  for (const LevelRecord& l : t.levels) {
    levels.push_back({{"depth", l.depth}, {"terms", l.terms}, {"skipped", l.skipped}, {"partial", to_string(l.partial)}});
  }
  return levels;
}

int cmd_compile(const std::string& input, std::string output, const CompileFlags& cf, const std::string& emit_cnf,
                const std::string& emit_nnf, const std::string& emit_cycles, bool as_json) {
  const std::string text = read_file(input);
  PipelineOptions options = cf.options();
  options.keep_nnf = !emit_nnf.empty();
  CompiledArtifact art = compile_program(text, options);

  if (output.empty()) {
    auto dot = input.find_last_of('.');
    output = (dot == std::string::npos || input.find('/', dot) != std::string::npos ? input : input.substr(0, dot)) +
             ".ccg";
  }
  {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw InputError("cannot write " + output);
    save_artifact(out, art);
  }
  if (!emit_cnf.empty()) {
    Program p = normalize_supports(parse_program(text)).first;
    CnfDoc cnf = build_completion(p);
    std::ofstream out(emit_cnf);
    write_dimacs(out, cnf);
    std::ofstream map(emit_cnf + ".map");
    write_var_map(map, cnf, p.names());
  }
  if (!emit_nnf.empty()) {
    std::ofstream out(emit_nnf);
    write_nnf(out, *art.nnf);
  }
  if (!emit_cycles.empty()) {
    std::ofstream out(emit_cycles);
    write_catalog(out, art.catalog, art.atom_names);
  }

  auto compressed = art.compressed_size();
  if (as_json) {
    json j = {{"artifact", output},
              {"digest", art.digest},
              {"atoms", art.original_atoms},
              {"normalized_atoms", art.atom_names.size()},
              {"rules", art.rule_count},
              {"tight", art.tight},
              {"cycles", art.catalog.size()},
              {"cycle_mode", to_string(art.catalog.mode)},
              {"catalog_complete", art.catalog.complete},
              {"cnf_vars", art.cnf_vars},
              {"cnf_clauses", art.cnf_clauses},
              {"nnf_nodes", art.nnf_size.node_count},
              {"nnf_edges", art.nnf_size.edge_count},
              {"compressed_nodes", compressed.node_count},
              {"compressed_edges", compressed.edge_count},
              {"supported_count", to_string(art.supported_count)},
              {"timings", timings_json(art.timings)}};
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "atoms:            " << art.original_atoms;
  if (art.atom_names.size() != art.original_atoms) std::cout << " (" << art.atom_names.size() << " after normalization)";
  std::cout << "\nrules:            " << art.rule_count << "\ntight:            " << (art.tight ? "yes" : "no")
            << "\ncycles:           " << art.catalog.size() << " (" << to_string(art.catalog.mode)
            << (art.catalog.complete ? ", complete" : ", simple cycles only") << ")"
            << "\ncompletion:       " << art.cnf_vars << " vars, " << art.cnf_clauses << " clauses"
            << "\nsd-DNNF:          " << art.nnf_size.node_count << " nodes, " << art.nnf_size.edge_count << " edges"
            << "\ncompressed:       " << compressed.node_count << " nodes, " << compressed.edge_count << " edges"
            << "\nsupported models: " << to_string(art.supported_count) << '\n';
  std::cout << std::fixed << std::setprecision(6) << "time sd-DNNF[s]:  " << art.timings.compile
            << "\ntime ccg[s]:      " << art.timings.graph << "\ntime cycles[s]:   " << art.timings.cycles
            << "\nartifact:         " << output << '\n';
  return kOk;
}

int cmd_count(const std::string& input, const CompileFlags& cf, const CountFlags& kf, bool as_json) {
  CompiledArtifact art = obtain(input, cf, kf);
  AssumptionSet l = AssumptionSet::parse(art.atom_names, kf.assume);
  auto trace = count(art, l, kf.parsed_depth(), kf.refine());
  if (trace.inconsistent) std::cerr << "warning: assumptions are inconsistent\n";
  if (!trace.note.empty() && !trace.inconsistent) std::cerr << "note: " << trace.note << '\n';
  if (as_json) {
    json j = {{"count", to_string(trace.count())},
              {"bound", to_string(trace.bound)},
              {"depth", trace.target_depth},
              {"a0", to_string(trace.partials.front())},
              {"trace", trace_json(trace)},
              {"evaluations_performed", trace.evaluations_performed},
              {"evaluations_skipped", trace.evaluations_skipped},
              {"timings", timings_json(art.timings)}};
    j["terminated_at"] = trace.terminated_at ? json(*trace.terminated_at) : json(nullptr);
    if (trace.inconsistent) j["warning"] = "inconsistent";
    if (trace.warning) j["warning"] = "no cycle catalog";
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << to_string(trace.count()) << " (" << to_string(trace.bound) << ")\n";
  write_trace(std::cout, trace);
  return kOk;
}

int cmd_facets(const std::string& input, const CompileFlags& cf, const CountFlags& kf, bool as_json) {
  CompiledArtifact art = obtain(input, cf, kf);
  AssumptionSet l = AssumptionSet::parse(art.atom_names, kf.assume);
  if (!l.consistent()) {
    std::cerr << "warning: assumptions are inconsistent\n";
    if (as_json) std::cout << json{{"facets", json::array()}, {"warning", "inconsistent"}}.dump(2) << '\n';
    return kOk;
  }
  auto facets = compute_facets(art, l, kf.parsed_depth(), kf.refine(), 0);
  if (as_json) {
    json arr = json::array();
    for (const Facet& f : facets) {
      arr.push_back({{"atom", f.name},
                     {"count_true", to_string(f.count_true)},
                     {"count_false", to_string(f.count_false)},
                     {"bound_true", to_string(f.bound_true)},
                     {"bound_false", to_string(f.bound_false)},
                     {"ratio_true", f.ratio_true}});
    }
    std::cout << json{{"facets", arr}}.dump(2) << '\n';
    return kOk;
  }
  for (const Facet& f : facets) {
    std::cout << f.name << ": true=" << to_string(f.count_true) << " (" << to_string(f.bound_true)
              << ") false=" << to_string(f.count_false) << " (" << to_string(f.bound_false)
              << ") ratio=" << std::setprecision(4) << f.ratio_true << '\n';
  }
  return kOk;
}

int cmd_oracle(const std::string& input, const std::string& assume, const std::string& semantics, bool as_json) {
  Program p = parse_program(read_file(input));
  AssumptionSet l = AssumptionSet::parse(p, assume);
  auto sem = semantics == "supported" ? oracle::Semantics::supported : oracle::Semantics::answer;
  std::uint64_t n = oracle::count_under(p, l, sem);
  if (as_json) {
    std::cout << json{{"count", std::to_string(n)}, {"semantics", semantics}}.dump(2) << '\n';
  } else {
    std::cout << n << '\n';
  }
  return kOk;
}

int cmd_serve(std::string host, int port, const std::string& store, const CompileFlags& cf, const CountFlags& kf,
              std::size_t sync_atoms) {
  if (const char* bind = std::getenv("LPCOUNT_BIND"); bind && host.empty()) {
    std::string b = bind;
    auto colon = b.rfind(':');
    if (colon != std::string::npos) {
      host = b.substr(0, colon);
      if (port == 0) port = std::stoi(b.substr(colon + 1));
    } else {
      host = b;
    }
  }
  if (host.empty()) host = "127.0.0.1";
  if (port == 0) port = 8080;

  ServiceOptions options;
  options.pipeline = cf.options();
  options.refine = kf.refine();
  options.default_depth = kf.parsed_depth();
  options.sync_atom_limit = sync_atoms;
  if (!store.empty()) options.store_dir = store;
  NavService service(options);
  httplib::Server server;
  service.mount(server);
  std::cerr << "listening on " << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot bind " << host << ':' << port << '\n';
    return kInput;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Answer-set counting on compiled counting graphs"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  std::string input;
  CompileFlags cf;
  CountFlags kf;

  auto* compile = app.add_subcommand("compile", "compile a program into a .ccg artifact");
  std::string output, emit_cnf, emit_nnf, emit_cycles;
  compile->add_option("program", input, "ground normal program")->required();
  compile->add_option("-o,--output", output, "artifact path (default: <program>.ccg)");
  compile->add_option("--emit-cnf", emit_cnf, "write the completion as DIMACS (plus a .map sidecar)");
  compile->add_option("--emit-nnf", emit_nnf, "write the smoothed sd-DNNF");
  compile->add_option("--emit-cycles", emit_cycles, "write the cycle catalog");
  compile->add_flag("--json", as_json, "machine-readable output");
  cf.add(compile);

  auto* count = app.add_subcommand("count", "count answer sets under assumptions");
  count->add_option("input", input, "artifact (.ccg) or program")->required();
  count->add_flag("--json", as_json, "machine-readable output");
  cf.add(count);
  kf.add(count);

  auto* facets = app.add_subcommand("facets", "per-atom counts under assumptions");
  facets->add_option("input", input, "artifact (.ccg) or program")->required();
  facets->add_flag("--json", as_json, "machine-readable output");
  cf.add(facets);
  kf.add(facets);

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force count by definition (small programs)");
  std::string semantics = "answer";
  oracle_cmd->add_option("program", input, "ground normal program")->required();
  oracle_cmd->add_option("--assume", kf.assume, "assumption literals, e.g. a,-b");
  oracle_cmd->add_option("--semantics", semantics, "answer or supported")
      ->check(CLI::IsMember({"answer", "supported"}));
  oracle_cmd->add_flag("--json", as_json, "machine-readable output");

  auto* serve = app.add_subcommand("serve", "run the navigation service");
  std::string host, store;
  int port = 0;
  std::size_t sync_atoms = ServiceOptions{}.sync_atom_limit;
  serve->add_option("--host", host, "bind address (default from LPCOUNT_BIND, else 127.0.0.1)");
  serve->add_option("--port", port, "port (default from LPCOUNT_BIND, else 8080)");
  serve->add_option("--store", store, "directory caching compiled artifacts");
  serve->add_option("--sync-atoms", sync_atoms, "programs above this many atoms compile in the background");
  serve->add_option("--depth", kf.depth, "default refinement depth");
  cf.add(serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*compile) return cmd_compile(input, output, cf, emit_cnf, emit_nnf, emit_cycles, as_json);
    if (*count) return cmd_count(input, cf, kf, as_json);
    if (*facets) return cmd_facets(input, cf, kf, as_json);
    if (*oracle_cmd) return cmd_oracle(input, kf.assume, semantics, as_json);
    if (*serve) return cmd_serve(host, port, store, cf, kf, sync_atoms);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CompileBudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const CycleBudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const RefineBudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const oracle::SizeGuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kUsage;
}
