#include "lpcount/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <thread>

#include "binio.hpp"

namespace lpc {

namespace {

constexpr std::uint32_t kArtifactMagic = 0x41435043;  // "CPCA"
constexpr std::uint32_t kArtifactVersion = 1;

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void put_double(std::ostream& out, double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof v);
  detail::put_u64(out, bits);
}

double get_double(std::istream& in) {
  std::uint64_t bits = detail::get_u64(in);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void put_atoms(std::ostream& out, const AtomSet& s) {
  detail::put_u32(out, static_cast<std::uint32_t>(s.size()));
  for (AtomId a : s) detail::put_u32(out, a);
}

AtomSet get_atoms(std::istream& in, std::size_t atom_count) {
  AtomSet s(detail::get_u32(in));
  for (AtomId& a : s) {
    a = detail::get_u32(in);
    if (a >= atom_count) throw std::runtime_error("artifact cycle atom out of range");
  }
  return s;
}

}  // namespace

std::string program_digest(std::string_view text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xF];
  }
  return hex;
}

CompiledArtifact compile_program(std::string_view text, const PipelineOptions& options) {
  CompiledArtifact art;
  art.digest = program_digest(text);
  Stopwatch clock;

  Program input = parse_program(text);
  art.original_atoms = input.atom_count();
  art.rule_count = input.rules().size();
  art.tight = is_tight(build_depgraph(input));
  art.timings.parse = clock.lap();

  Program program = normalize_supports(input).first;
  art.atom_names = program.names();
  art.timings.normalize = clock.lap();

  CnfDoc cnf = build_completion(program);
  art.cnf_vars = cnf.num_vars;
  art.cnf_clauses = cnf.clauses.size();
  art.timings.completion = clock.lap();

  NnfDag dag;
  if (options.nnf_file) {
    std::ifstream in(*options.nnf_file);
    if (!in) throw std::runtime_error("cannot open NNF file " + *options.nnf_file);
    dag = read_nnf(in);
    if (dag.num_vars() != cnf.num_vars) {
      throw std::runtime_error("NNF has " + std::to_string(dag.num_vars()) + " variables, completion has " +
                               std::to_string(cnf.num_vars));
    }
    NnfReport r = validate(dag);
    if (!r.decomposable || !r.deterministic) {
      throw NotSmoothError("external NNF is not decomposable and deterministic");
    }
    dag = prune_unreachable(smooth(dag));
  } else {
    dag = compile(cnf, CompileOptions{options.order, options.node_budget});
  }
  art.nnf_size = {dag.node_count(), dag.edge_count()};
  art.timings.compile = clock.lap();
  if (options.keep_nnf) art.nnf = std::make_shared<const NnfDag>(dag);

  CountingGraph graph(std::move(dag), cnf.var_kind, program.atom_count());
  art.graph = CompressedGraph::compress(graph, &art.compress_stats);
  art.supported_count = art.graph.evaluate({});
  art.timings.graph = clock.lap();

  art.catalog = build_catalog(program, options.cycles, options.cycle_cap);
  art.timings.cycles = clock.lap();
  return art;
}

void save_artifact(std::ostream& out, const CompiledArtifact& art) {
  using namespace detail;
  put_u32(out, kArtifactMagic);
  put_u32(out, kArtifactVersion);
  put_string(out, art.digest);
  put_u32(out, static_cast<std::uint32_t>(art.atom_names.size()));
  for (const auto& n : art.atom_names) put_string(out, n);
  put_u64(out, art.original_atoms);
  put_u64(out, art.rule_count);
  put_u32(out, art.tight ? 1 : 0);
  put_u32(out, art.cnf_vars);
  put_u64(out, art.cnf_clauses);
  put_u64(out, art.nnf_size.node_count);
  put_u64(out, art.nnf_size.edge_count);
  put_u64(out, art.compress_stats.traversals);
  put_u64(out, art.compress_stats.ignored);
  put_u64(out, art.compress_stats.absorbed);
  put_string(out, to_string(art.supported_count));
  for (double t : {art.timings.parse, art.timings.normalize, art.timings.completion, art.timings.compile,
                   art.timings.graph, art.timings.cycles}) {
    put_double(out, t);
  }
  put_u32(out, art.catalog.mode == CycleMode::exhaustive ? 1 : 0);
  put_u32(out, art.catalog.complete ? 1 : 0);
  put_u32(out, static_cast<std::uint32_t>(art.catalog.cycles.size()));
  for (const CycleEntry& e : art.catalog.cycles) {
    put_atoms(out, e.atoms);
    put_atoms(out, e.supports);
  }
  art.graph.write(out);
  if (!out) throw std::runtime_error("failed to write artifact");
}

CompiledArtifact load_artifact(std::istream& in) {
  using namespace detail;
  if (get_u32(in) != kArtifactMagic) throw std::runtime_error("not a compiled artifact");
  if (get_u32(in) != kArtifactVersion) throw std::runtime_error("unsupported artifact version");
  CompiledArtifact art;
  art.digest = get_string(in, 128);
  std::uint32_t names = get_u32(in);
  for (std::uint32_t i = 0; i < names; ++i) art.atom_names.push_back(get_string(in, 1 << 16));
  art.original_atoms = get_u64(in);
  if (art.original_atoms > art.atom_names.size()) throw std::runtime_error("artifact atom table is inconsistent");
  art.rule_count = get_u64(in);
  art.tight = get_u32(in) != 0;
  art.cnf_vars = get_u32(in);
  art.cnf_clauses = get_u64(in);
  art.nnf_size.node_count = get_u64(in);
  art.nnf_size.edge_count = get_u64(in);
  art.compress_stats.traversals = get_u64(in);
  art.compress_stats.ignored = get_u64(in);
  art.compress_stats.absorbed = get_u64(in);
  if (art.supported_count.set_str(get_string(in, 1 << 20), 10) != 0) {
    throw std::runtime_error("artifact supported count is malformed");
  }
  for (double* t : {&art.timings.parse, &art.timings.normalize, &art.timings.completion, &art.timings.compile,
                    &art.timings.graph, &art.timings.cycles}) {
    *t = get_double(in);
  }
  art.catalog.mode = get_u32(in) ? CycleMode::exhaustive : CycleMode::simple;
  art.catalog.complete = get_u32(in) != 0;
  std::uint32_t cycles = get_u32(in);
  for (std::uint32_t i = 0; i < cycles; ++i) {
    CycleEntry e;
    e.atoms = get_atoms(in, art.atom_names.size());
    e.supports = get_atoms(in, art.atom_names.size());
    e.constraint = unsupported_constraint(e.atoms, e.supports);
    art.catalog.cycles.push_back(std::move(e));
  }
  art.graph = CompressedGraph::read(in);
  if (art.graph.atom_count() != art.atom_names.size()) throw std::runtime_error("artifact graph does not match atoms");
  return art;
}

void verify_digest(const CompiledArtifact& artifact, std::string_view text) {
  if (program_digest(text) != artifact.digest) {
    throw DigestMismatch("artifact was compiled from a different program");
  }
}

RefinementTrace count(const CompiledArtifact& artifact, const AssumptionSet& assumptions,
                      std::optional<std::size_t> depth, RefineOptions options) {
  options.program_tight = artifact.tight;
  return refine(artifact.graph, artifact.catalog, assumptions, depth, options);
}

std::vector<Facet> compute_facets(const CompiledArtifact& artifact, const AssumptionSet& assumptions,
                                  std::optional<std::size_t> depth, RefineOptions options, unsigned threads) {
  options.program_tight = artifact.tight;
  options.threads = 1;
  std::vector<Facet> facets;
  for (AtomId a = 0; a < artifact.original_atoms; ++a) {
    if (assumptions.mentions(a)) continue;
    Facet f;
    f.atom = a;
    f.name = artifact.atom_names[a];
    facets.push_back(std::move(f));
  }
  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Facet& f = facets[i];
      auto t = refine(artifact.graph, artifact.catalog, assumptions.with(pos(f.atom)), depth, options);
      auto e = refine(artifact.graph, artifact.catalog, assumptions.with(neg(f.atom)), depth, options);
      f.count_true = t.count();
      f.count_false = e.count();
      f.bound_true = t.bound;
      f.bound_false = e.bound;
      Count total = f.count_true + f.count_false;
      f.ratio_true = total > 0 ? mpq_class(f.count_true, total).get_d() : 0.0;
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, facets.size()));
  if (threads <= 1) {
    fill(0, facets.size());
    return facets;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t step = (facets.size() + threads - 1) / threads;
  for (std::size_t lo = 0; lo < facets.size(); lo += step) {
    jobs.push_back(std::async(std::launch::async, fill, lo, std::min(facets.size(), lo + step)));
  }
  for (auto& j : jobs) j.get();
  return facets;
}

}  // namespace lpc
