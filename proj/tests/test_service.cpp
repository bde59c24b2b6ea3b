#include <doctest.h>
#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <json.hpp>
#include <thread>

#include "lpcount/service.hpp"
#include "support/support.hpp"

using nlohmann::json;

namespace {

/// Service on an ephemeral local port for the lifetime of the fixture.
class Harness {
 public:
  explicit Harness(lpc::ServiceOptions options = {}) : service_(std::move(options)) {
    service_.mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Harness() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

  lpc::NavService& service() { return service_; }

  /// POSTs a program and returns the new session id.
  std::string load(const std::string& text) {
    auto res = client().Post("/programs", text, "text/plain");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return json::parse(res->body)["session_id"];
  }

 private:
  lpc::NavService service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json get_json(const httplib::Client& c, const std::string& path, int expect_status = 200) {
  auto& client = const_cast<httplib::Client&>(c);
  auto res = client.Get(path);
  REQUIRE(res);
  CHECK(res->status == expect_status);
  return json::parse(res->body);
}

json post_json(const httplib::Client& c, const std::string& path, const json& body, int expect_status = 200) {
  auto& client = const_cast<httplib::Client&>(c);
  auto res = client.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expect_status);
  return json::parse(res->body);
}

}  // namespace

TEST_CASE("load the third example and read its stats") {
  Harness h;
  auto c = h.client();
  auto res = c.Post("/programs", lpc::test::read_data("pi3.lp"), "text/plain");
  REQUIRE(res);
  CHECK(res->status == 200);
  json body = json::parse(res->body);
  CHECK(body["status"] == "ready");
  const json& stats = body["stats"];
  CHECK(stats["atoms"] == 7);
  CHECK(stats["rules"] == 9);
  CHECK(stats["tight"] == false);
  CHECK(stats["cycles"] == 2);
  CHECK(stats["supported_count"] == "6");
  CHECK(stats["terms_by_depth"] == json::array({"0", "2", "3"}));
  CHECK(stats["timings"].contains("sd_dnnf"));
  CHECK(stats["timings"].contains("ccg"));
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");

  std::string id = body["session_id"];
  json status = get_json(c, "/programs/" + id);
  CHECK(status["status"] == "ready");
}

TEST_CASE("counts with query assumptions and depth") {
  Harness h;
  std::string id = h.load(lpc::test::read_data("pi3.lp"));
  auto c = h.client();
  json full = get_json(c, "/programs/" + id + "/count");
  CHECK(full["count"] == "2");
  CHECK(full["bound"] == "exact");

  json d1 = get_json(c, "/programs/" + id + "/count?assume=d&depth=1");
  CHECK(d1["count"] == "0");
  CHECK(d1["bound"] == "lower");
  json d2 = get_json(c, "/programs/" + id + "/count?assume=d&depth=2");
  CHECK(d2["count"] == "1");
  CHECK(d2["bound"] == "exact");
  CHECK(d2["trace"].size() == 3);

  json bad = get_json(c, "/programs/" + id + "/count?assume=d,-d");
  CHECK(bad["count"] == "0");
  CHECK(bad["warning"] == "inconsistent");

  get_json(c, "/programs/" + id + "/count?depth=minus", 400);
  get_json(c, "/programs/" + id + "/count?assume=zz", 400);
}

TEST_CASE("assume and undo") {
  Harness h;
  std::string id = h.load(lpc::test::read_data("pi3.lp"));
  auto c = h.client();
  json a = post_json(c, "/programs/" + id + "/assume", {{"literal", "d"}});
  CHECK(a["count"] == "1");
  CHECK(a["assumptions"] == "d");
  CHECK(a["history"] == 1);

  json conflict = post_json(c, "/programs/" + id + "/assume", {{"literal", "-d"}}, 409);
  CHECK(conflict.contains("error"));
  CHECK(get_json(c, "/programs/" + id + "/count")["count"] == "1");

  json u = post_json(c, "/programs/" + id + "/undo", json::object());
  CHECK(u["count"] == "2");
  CHECK(u["assumptions"] == "");
  post_json(c, "/programs/" + id + "/undo", json::object(), 409);

  post_json(c, "/programs/" + id + "/assume", {{"literals", "c,-e"}});
  json facets = get_json(c, "/programs/" + id + "/facets");
  CHECK(facets["assumptions"] == "c,-e");
  CHECK(facets["facets"].size() == 5);
  for (const json& f : facets["facets"]) CHECK(f["count_true"].is_string());

  post_json(c, "/programs/" + id + "/assume", {{"nope", 1}}, 400);
}

TEST_CASE("facets of the second example") {
  Harness h;
  std::string id = h.load(lpc::test::read_data("pi2.lp"));
  json facets = get_json(h.client(), "/programs/" + id + "/facets");
  REQUIRE(facets["facets"].size() == 4);
  for (const json& f : facets["facets"]) {
    if (f["atom"] == "a") {
      CHECK(f["count_true"] == "1");
      CHECK(f["count_false"] == "1");
      CHECK(f["ratio_true"].get<double>() == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("errors") {
  Harness h;
  auto c = h.client();
  get_json(c, "/programs/deadbeef", 404);
  get_json(c, "/programs/deadbeef/count", 404);
  auto res = c.Post("/programs", "a :- b", "text/plain");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["error"].get<std::string>().find("1:") != std::string::npos);
  post_json(c, "/programs", {{"text", "a."}}, 400);
  auto opt = c.Options("/programs");
  REQUIRE(opt);
  CHECK(opt->status == 204);
  CHECK(opt->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
}

TEST_CASE("JSON body with cycle mode and depth") {
  Harness h;
  auto c = h.client();
  json body =
      post_json(c, "/programs", {{"program", lpc::test::read_data("pi4.lp")}, {"cycles", "exhaustive"}, {"depth", 0}});
  CHECK(body["stats"]["cycle_mode"] == "exhaustive");
  std::string id = body["session_id"];
  CHECK(get_json(c, "/programs/" + id + "/count")["count"] == "5");
  CHECK(get_json(c, "/programs/" + id + "/count?depth=full")["count"] == "4");
}

TEST_CASE("large programs compile in the background") {
  lpc::ServiceOptions opts;
  opts.sync_atom_limit = 3;
  Harness h(opts);
  auto c = h.client();
  auto res = c.Post("/programs", lpc::test::read_data("pi3.lp"), "text/plain");
  REQUIRE(res);
  CHECK(res->status == 202);
  json body = json::parse(res->body);
  std::string id = body["session_id"];
  CHECK(body["poll"] == "/programs/" + id);
  h.service().wait_idle();
  CHECK(get_json(c, "/programs/" + id)["status"] == "ready");
  CHECK(get_json(c, "/programs/" + id + "/count")["count"] == "2");
}

TEST_CASE("artifact store is reused") {
  auto dir = std::filesystem::temp_directory_path() / "lpcount_service_store";
  std::filesystem::remove_all(dir);
  lpc::ServiceOptions opts;
  opts.store_dir = dir;
  {
    Harness h(opts);
    h.load(lpc::test::read_data("pi2.lp"));
  }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.path().extension() == ".ccg";
  CHECK(files == 1);
  {
    Harness h(opts);
    std::string id = h.load(lpc::test::read_data("pi2.lp"));
    CHECK(get_json(h.client(), "/programs/" + id + "/count")["count"] == "2");
  }
  std::filesystem::remove_all(dir);
}
