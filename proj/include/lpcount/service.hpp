#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lpcount/pipeline.hpp"

namespace httplib {
class Server;
}

namespace lpc {

struct ServiceOptions {
  PipelineOptions pipeline;
  RefineOptions refine;
  /// Refinement depth used when a request does not name one; nullopt is full depth.
  std::optional<std::size_t> default_depth;
  /// Programs with more atoms than this compile in the background (202 + polling).
  std::size_t sync_atom_limit = 64;
  unsigned facet_threads = 0;
  /// Compiled artifacts are cached here by program digest and cycle mode.
  std::optional<std::filesystem::path> store_dir;
  std::string cors_origin = "*";
};

/// Navigation sessions over compiled programs, exposed as JSON over HTTP.
///
///   POST /programs                  body: program text, or {"program", "cycles", "depth"}
///   GET  /programs/{id}             compilation status and stats
///   GET  /programs/{id}/count       ?assume=a,-b&depth=k
///   GET  /programs/{id}/facets      ?assume=...&depth=k
///   POST /programs/{id}/assume      {"literal": "-b"} or {"literals": "a,-b"}
///   POST /programs/{id}/undo
///
/// Counts are decimal strings. Query assumptions are added to the session's current ones.
class NavService {
 public:
  explicit NavService(ServiceOptions options = {});
  ~NavService();
  NavService(const NavService&) = delete;
  NavService& operator=(const NavService&) = delete;

  void mount(httplib::Server& server);

  /// Blocks until every background compilation has finished.
  void wait_idle();

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const CompiledArtifact> build(const std::string& text, const PipelineOptions& options);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::vector<std::future<void>> background_;
};

}  // namespace lpc
