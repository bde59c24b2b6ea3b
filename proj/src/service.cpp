#include "lpcount/service.hpp"

#include <httplib.h>

#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

namespace lpc {

using nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string message;
};

std::string new_session_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  std::ostringstream out;
  out << std::hex << rng() << rng();
  return out.str();
}

json timings_json(const PhaseTimings& t) {
  return {{"parse", t.parse},     {"normalize", t.normalize}, {"completion", t.completion},
          {"sd_dnnf", t.compile}, {"ccg", t.graph},           {"cycles", t.cycles}};
}

json stats_json(const CompiledArtifact& a) {
  json terms = json::array();
  for (std::size_t d = 0; d <= std::min<std::size_t>(a.catalog.size(), 64); ++d) {
    terms.push_back(std::to_string(term_count(a.catalog.size(), d)));
  }
  return {{"digest", a.digest},
          {"atoms", a.original_atoms},
          {"rules", a.rule_count},
          {"tight", a.tight},
          {"cycles", a.catalog.size()},
          {"cycle_mode", to_string(a.catalog.mode)},
          {"catalog_complete", a.catalog.complete},
          {"supported_count", to_string(a.supported_count)},
          {"cnf_vars", a.cnf_vars},
          {"cnf_clauses", a.cnf_clauses},
          {"nnf_nodes", a.nnf_size.node_count},
          {"nnf_edges", a.nnf_size.edge_count},
          {"compressed_nodes", a.compressed_size().node_count},
          {"compressed_edges", a.compressed_size().edge_count},
          {"terms_by_depth", terms},
          {"timings", timings_json(a.timings)}};
}

json trace_json(const RefinementTrace& t) {
  json levels = json::array();
  levels.push_back({{"depth", 0},
                    {"terms", t.inconsistent ? 0 : 1},
                    {"skipped", t.inconsistent ? 1 : 0},
                    {"partial", to_string(t.partials.front())}});
  for (const LevelRecord& l : t.levels) {
    levels.push_back({{"depth", l.depth}, {"terms", l.terms}, {"skipped", l.skipped}, {"partial", to_string(l.partial)}});
  }
  json out = {{"count", to_string(t.count())},
              {"bound", to_string(t.bound)},
              {"depth", t.target_depth},
              {"requested_depth", t.requested_depth},
              {"evaluations_performed", t.evaluations_performed},
              {"evaluations_skipped", t.evaluations_skipped},
              {"trace", levels}};
  out["terminated_at"] = t.terminated_at ? json(*t.terminated_at) : json(nullptr);
  if (t.inconsistent) out["warning"] = "inconsistent";
  if (t.warning) out["warning"] = "no cycle catalog";
  if (!t.note.empty()) out["note"] = t.note;
  return out;
}

std::optional<std::size_t> parse_depth(const std::string& text) {
  if (text.empty() || text == "full") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text[0] == '-') throw HttpError{400, "depth must be a non-negative integer or 'full'"};
  return static_cast<std::size_t>(v);
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

struct NavService::Session {
  std::string id;
  std::optional<std::size_t> depth;
  mutable std::shared_mutex mu;
  std::shared_ptr<const CompiledArtifact> artifact;
  std::string status = "compiling";
  int error_status = 0;
  std::string error;
  AssumptionSet current;
  std::vector<AssumptionSet> history;
};

NavService::NavService(ServiceOptions options) : options_(std::move(options)) {
  if (options_.store_dir) std::filesystem::create_directories(*options_.store_dir);
}

NavService::~NavService() { wait_idle(); }

void NavService::wait_idle() {
  std::vector<std::future<void>> jobs;
  {
    std::lock_guard lock(mutex_);
    jobs.swap(background_);
  }
  for (auto& j : jobs) j.wait();
}

std::shared_ptr<NavService::Session> NavService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError{404, "no session " + id};
  return it->second;
}

std::shared_ptr<const CompiledArtifact> NavService::build(const std::string& text, const PipelineOptions& options) {
  if (!options_.store_dir || options.nnf_file) {
    return std::make_shared<const CompiledArtifact>(compile_program(text, options));
  }
  auto path = *options_.store_dir / (program_digest(text) + "-" + to_string(options.cycles) + ".ccg");
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    try {
      auto art = std::make_shared<CompiledArtifact>(load_artifact(in));
      verify_digest(*art, text);
      return art;
    } catch (const std::exception&) {
      // unreadable cache entry: rebuild below
    }
  }
  auto art = std::make_shared<const CompiledArtifact>(compile_program(text, options));
  auto tmp = path;
  tmp += ".tmp" + new_session_id();
  {
    std::ofstream out(tmp, std::ios::binary);
    save_artifact(out, *art);
  }
  std::filesystem::rename(tmp, path);
  return art;
}

void NavService::mount(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        reply(res, e.status, {{"error", e.message}});
      } catch (const std::invalid_argument& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const RefineBudgetError& e) {
        reply(res, 422, {{"error", e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
      }
    };
  };

  // Ready session or an error response.
  auto ready = [this](const std::string& id) {
    auto s = find(id);
    std::shared_lock lock(s->mu);
    if (s->status == "compiling") throw HttpError{409, "session " + id + " is still compiling"};
    if (s->status == "failed") throw HttpError{s->error_status, s->error};
    return s;
  };

  // Session assumptions plus those named in ?assume=.
  auto assumptions_of = [](const Session& s, const httplib::Request& req) {
    std::shared_lock lock(s.mu);
    AssumptionSet l = s.current;
    if (req.has_param("assume")) {
      l = l.with(AssumptionSet::parse(s.artifact->atom_names, req.get_param_value("assume")).literals());
    }
    return std::pair{l, s.depth};
  };

  auto depth_of = [this](const httplib::Request& req, std::optional<std::size_t> session_depth) {
    if (req.has_param("depth")) return parse_depth(req.get_param_value("depth"));
    return session_depth ? session_depth : options_.default_depth;
  };

  auto state_json = [this](const Session& s) {
    auto trace = count(*s.artifact, s.current, s.depth ? s.depth : options_.default_depth, options_.refine);
    json out = trace_json(trace);
    out["session_id"] = s.id;
    out["assumptions"] = s.current.format(s.artifact->atom_names);
    out["history"] = s.history.size();
    return out;
  };

  server.Post("/programs", guarded([this](const httplib::Request& req, httplib::Response& res) {
                std::string text = req.body;
                PipelineOptions pipeline = options_.pipeline;
                std::optional<std::size_t> depth = options_.default_depth;
                if (req.get_header_value("Content-Type").starts_with("application/json")) {
                  json body = json::parse(req.body, nullptr, false);
                  if (body.is_discarded() || !body.is_object() || !body.contains("program") ||
                      !body["program"].is_string()) {
                    throw HttpError{400, "expected a JSON object with a \"program\" string"};
                  }
                  text = body["program"].get<std::string>();
                  if (body.contains("cycles")) pipeline.cycles = parse_cycle_mode(body["cycles"].get<std::string>());
                  if (body.contains("depth")) {
                    const json& d = body["depth"];
                    depth = d.is_number_unsigned() ? std::optional<std::size_t>(d.get<std::size_t>())
                                                   : parse_depth(d.is_string() ? d.get<std::string>() : "x");
                  }
                }
                Program parsed;
                try {
                  parsed = parse_program(text);
                } catch (const ParseError& e) {
                  throw HttpError{400, e.what()};
                }
                auto s = std::make_shared<Session>();
                s->id = new_session_id();
                s->depth = depth;
                {
                  std::lock_guard lock(mutex_);
                  sessions_[s->id] = s;
                }
                auto run = [this, s, text, pipeline] {
                  std::shared_ptr<const CompiledArtifact> art;
                  int status = 0;
                  std::string error;
                  try {
                    art = build(text, pipeline);
                  } catch (const CompileBudgetError& e) {
                    status = 422, error = e.what();
                  } catch (const CycleBudgetError& e) {
                    status = 422, error = e.what();
                  } catch (const std::exception& e) {
                    status = 400, error = e.what();
                  }
                  std::unique_lock lock(s->mu);
                  s->artifact = art;
                  s->status = art ? "ready" : "failed";
                  s->error_status = status;
                  s->error = error;
                };
                if (parsed.atom_count() > options_.sync_atom_limit) {
                  std::lock_guard lock(mutex_);
                  background_.push_back(std::async(std::launch::async, run));
                  reply(res, 202, {{"session_id", s->id}, {"status", "compiling"}, {"poll", "/programs/" + s->id}});
                  return;
                }
                run();
                std::shared_lock lock(s->mu);
                if (!s->artifact) {
                  std::lock_guard g(mutex_);
                  sessions_.erase(s->id);
                  throw HttpError{s->error_status, s->error};
                }
                reply(res, 200, {{"session_id", s->id}, {"status", "ready"}, {"stats", stats_json(*s->artifact)}});
              }));

  server.Get(R"(/programs/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = find(req.matches[1]);
               std::shared_lock lock(s->mu);
               json out = {{"session_id", s->id}, {"status", s->status}};
               if (s->artifact) out["stats"] = stats_json(*s->artifact);
               if (s->status == "failed") {
                 out["error"] = s->error;
                 reply(res, s->error_status, out);
                 return;
               }
               reply(res, 200, out);
             }));

  server.Get(R"(/programs/([0-9a-f]+)/count)",
             guarded([=, this](const httplib::Request& req, httplib::Response& res) {
               auto s = ready(req.matches[1]);
               auto [l, session_depth] = assumptions_of(*s, req);
               auto trace = count(*s->artifact, l, depth_of(req, session_depth), options_.refine);
               json out = trace_json(trace);
               out["assumptions"] = l.format(s->artifact->atom_names);
               reply(res, 200, out);
             }));

  server.Get(R"(/programs/([0-9a-f]+)/facets)",
             guarded([=, this](const httplib::Request& req, httplib::Response& res) {
               auto s = ready(req.matches[1]);
               auto [l, session_depth] = assumptions_of(*s, req);
               auto depth = depth_of(req, session_depth);
               json facets = json::array();
               if (l.consistent()) {
                 for (const Facet& f :
                      compute_facets(*s->artifact, l, depth, options_.refine, options_.facet_threads)) {
                   facets.push_back({{"atom", f.name},
                                     {"count_true", to_string(f.count_true)},
                                     {"count_false", to_string(f.count_false)},
                                     {"bound_true", to_string(f.bound_true)},
                                     {"bound_false", to_string(f.bound_false)},
                                     {"ratio_true", f.ratio_true}});
                 }
               }
               json out = {{"assumptions", l.format(s->artifact->atom_names)}, {"facets", facets}};
               out["depth"] = depth ? json(*depth) : json("full");
               if (!l.consistent()) out["warning"] = "inconsistent";
               reply(res, 200, out);
             }));

  server.Post(R"(/programs/([0-9a-f]+)/assume)",
              guarded([=, this](const httplib::Request& req, httplib::Response& res) {
                auto s = ready(req.matches[1]);
                json body = json::parse(req.body, nullptr, false);
                std::string text;
                if (body.is_object() && body.contains("literal") && body["literal"].is_string()) {
                  text = body["literal"].get<std::string>();
                } else if (body.is_object() && body.contains("literals") && body["literals"].is_string()) {
                  text = body["literals"].get<std::string>();
                } else {
                  throw HttpError{400, "expected {\"literal\": \"a\"} or {\"literals\": \"a,-b\"}"};
                }
                std::unique_lock lock(s->mu);
                AssumptionSet add = AssumptionSet::parse(s->artifact->atom_names, text);
                AssumptionSet next = s->current.with(add.literals());
                if (!next.consistent()) {
                  throw HttpError{409, "'" + text + "' contradicts the current assumptions"};
                }
                s->history.push_back(s->current);
                s->current = std::move(next);
                reply(res, 200, state_json(*s));
              }));

  server.Post(R"(/programs/([0-9a-f]+)/undo)", guarded([=, this](const httplib::Request& req, httplib::Response& res) {
                auto s = ready(req.matches[1]);
                std::unique_lock lock(s->mu);
                if (s->history.empty()) throw HttpError{409, "nothing to undo"};
                s->current = std::move(s->history.back());
                s->history.pop_back();
                reply(res, 200, state_json(*s));
              }));
}

}  // namespace lpc
