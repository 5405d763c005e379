#include "doctest.h"

#include "temp_dir.hpp"

#include "mlp/cli.hpp"
#include "mlp/eval/synth.hpp"
#include "mlp/io/dataset_io.hpp"
#include "mlp/io/files.hpp"
#include "mlp/service/service.hpp"

// After Eigen: resolv.h defines _res.
#include "httplib.h"

#include <chrono>
#include <sstream>
#include <thread>

using namespace mlp;
using mlp::io::Json;
using mlp::testing::TempDir;

namespace {

Dataset corpus() {
  eval::SyntheticSpec spec;
  spec.n = 40;
  spec.v = 30;
  spec.k = 4;
  spec.support = 8;
  spec.grades = {3, 2, 1, 0};
  spec.seed = 21;
  return eval::synth_generate(spec).dataset;
}

std::string create_body(const Dataset& d, const Json& options) {
  return Json{{"dataset", io::dataset_to_json(d)}, {"options", options}}.dump();
}

Json bayes_options() {
  return Json{{"method", "bayes"}, {"seed", 2}, {"bayes", {{"iterations", 300}, {"burn_in", 100}}}};
}

// A server on a free port for the lifetime of the fixture.
struct Live {
  service::Service svc;
  service::HttpServer http{svc};
  int port = 0;
  std::unique_ptr<httplib::Client> client;

  Live() {
    port = http.bind("127.0.0.1", 0);
    http.start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(60, 0);
  }

  std::pair<int, Json> get(const std::string& path) {
    auto r = client->Get(path);
    REQUIRE(r);
    return {r->status, io::parse_json(r->body)};
  }
  std::pair<int, std::string> get_raw(const std::string& path) {
    auto r = client->Get(path);
    REQUIRE(r);
    return {r->status, r->body};
  }
  std::pair<int, Json> post(const std::string& path, const std::string& body) {
    auto r = client->Post(path, body, "application/json");
    REQUIRE(r);
    return {r->status, io::parse_json(r->body)};
  }

  // Polls the status endpoint until the run leaves the running state.
  Json finish(const std::string& id) {
    for (int i = 0; i < 6000; ++i) {
      auto [code, j] = get("/analyses/" + id + "/status");
      REQUIRE(code == 200);
      if (j["state"] != "running") return j;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    FAIL("analysis did not finish");
    return {};
  }

  std::string create(const std::string& body) {
    auto [code, j] = post("/analyses", body);
    REQUIRE(code == 202);
    const std::string id = j["id"];
    CHECK(finish(id)["state"] == "done");
    return id;
  }
};

std::string cli_out(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  REQUIRE(run_cli(args, out, err) == 0);
  return out.str();
}

Json rep_grades(Live& live, const std::string& id, double g) {
  auto [code, reps] = live.get("/analyses/" + id + "/representatives");
  REQUIRE(code == 200);
  Json grades = Json::object();
  for (const auto& r : reps["representatives"]) grades[r["id"].get<std::string>()] = g;
  return Json{{"grades", grades}};
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("clusters and grades match the command line") {
    TempDir tmp;
    const Dataset d = corpus();
    io::save_dataset(tmp.file("d.json"), d);
    Live live;
    for (const char* m : {"ap", "sc", "bayes"}) {
      CAPTURE(m);
      Json options = bayes_options();
      options["method"] = m;
      options["k"] = 4;
      const std::string id = live.create(create_body(d, options));

      const std::string analysis = tmp.file(std::string(m) + ".json");
      const std::string cli = cli_out({"cluster", "--dataset", tmp.file("d.json"), "--method", m, "--k", "4",
                                       "--seed", "2", "--iterations", "300", "--burn-in", "100", "--out", analysis});
      const Json from_cli = io::parse_json(io::read_file(analysis));
      auto [code, clusters] = live.get_raw("/analyses/" + id + "/clusters");
      CHECK(code == 200);
      CHECK(clusters == io::dump(from_cli["result"]));

      const Json grades = rep_grades(live, id, 2);
      io::write_file_atomic(tmp.file("g.json"), grades.dump());
      auto [gcode, report] = live.post("/analyses/" + id + "/grades", grades.dump());
      CHECK(gcode == 200);
      const std::string cli_report = cli_out({"grade", "--analysis", analysis, "--grades", tmp.file("g.json")});
      CHECK(io::dump(report) == cli_report);
      CHECK(live.get_raw("/analyses/" + id + "/grades").second == cli_report);
    }
  }

  TEST_CASE("error statuses") {
    const Dataset d = corpus();
    Live live;
    CHECK(live.post("/analyses", "{nope").first == 400);
    CHECK(live.post("/analyses", R"({"options": {}})").first == 400);
    CHECK(live.post("/analyses", R"({"dataset": {"schema": "mlp-dataset/1"}})").first == 400);
    CHECK(live.post("/analyses", create_body(d, {{"method", "sc"}})).first == 422);
    CHECK(live.post("/analyses", create_body(d, {{"method", "sc"}, {"k", 41}})).first == 422);
    CHECK(live.post("/analyses", create_body(d, {{"method", "ap"}, {"affinity", {{"damping", 0.2}}}})).first == 422);
    CHECK(live.post("/analyses", create_body(d, {{"method", "magic"}})).first == 400);

    Dataset blank = d;
    for (auto& s : blank.solutions) s = features::SolutionInput::from_body(s.learner_id, "");
    CHECK(live.post("/analyses", create_body(blank, {{"method", "ap"}})).first == 400);

    CHECK(live.get("/analyses/a99/status").first == 404);
    CHECK(live.get("/analyses/a99/clusters").first == 404);
    CHECK(live.post("/analyses/a99/grades", "{}").first == 404);

    const std::string id = live.create(create_body(d, {{"method", "ap"}}));
    const std::string base = "/analyses/" + id;
    auto [c409, missing] = live.get(base + "/grades");
    CHECK(c409 == 409);
    CHECK(missing["error"]["kind"] == "MissingGrades");
    CHECK(live.post(base + "/grades", R"({"grades": {}})").first == 409);
    CHECK(live.post(base + "/grades", R"({"grades": {"nobody": 1}})").first == 404);
    CHECK(live.post(base + "/grades", R"({"grades": 3})").first == 400);
    CHECK(live.post(base + "/grades", R"({"grades": {"s01": 9}})").first == 422);
    CHECK(live.get(base + "/solutions/s01/feedback").first == 422);
    CHECK(live.get(base + "/graph").first == 400);
    CHECK(live.get(base + "/graph?threshold=0").first == 400);
    CHECK(live.get(base + "/graph?threshold=abc").first == 400);
    CHECK(live.get(base + "/graph?threshold=0.5").first == 200);
    // Rejected submissions leave no trace.
    CHECK(live.get(base + "/audit").second["submissions"].empty());
  }

  TEST_CASE("a running analysis answers 409") {
    const Dataset d = corpus();
    service::Service svc;
    Json slow = bayes_options();
    slow["bayes"]["iterations"] = 20000;
    slow["bayes"]["burn_in"] = 100;
    const auto created = svc.create_analysis(create_body(d, slow));
    REQUIRE(created.status == 202);
    const std::string id = created.body["id"];
    const auto early = svc.clusters(id);
    if (svc.status(id).body["state"] == "running") {
      CHECK(early.status == 409);
      CHECK(early.body["error"]["kind"] == "NotReady");
    }
    svc.wait(id);
    CHECK(svc.clusters(id).status == 200);
    const auto st = svc.status(id).body;
    CHECK(st["progress"]["done"] == st["progress"]["total"]);
  }

  TEST_CASE("resubmission updates grades and the audit log replays") {
    const Dataset d = corpus();
    Live live;
    const std::string id = live.create(create_body(d, bayes_options()));
    const std::string base = "/analyses/" + id;
    const Json first = rep_grades(live, id, 3);
    REQUIRE(live.post(base + "/grades", first.dump()).first == 200);

    const std::string changed = first["grades"].begin().key();
    const Json second = {{"grades", {{changed, 0}}}};
    auto [code, report] = live.post(base + "/grades", second.dump());
    REQUIRE(code == 200);
    bool seen = false;
    for (const auto& s : report["solutions"]) {
      if (s["id"] == changed) {
        CHECK(s["grade"] == 0.0);
        seen = true;
      }
    }
    CHECK(seen);
    CHECK(live.get(base + "/grades").second == report);
    CHECK(live.post(base + "/grades", R"({"grades": {"nobody": 1}})").first == 404);

    auto [acode, audit] = live.get(base + "/audit");
    CHECK(acode == 200);
    REQUIRE(audit["submissions"].size() == 2);
    CHECK(audit["submissions"][0]["sequence"] == 1);
    CHECK(audit["submissions"][1]["grades"] == second["grades"]);

    // Replaying the log rebuilds the grade book.
    std::vector<service::AuditEntry> log;
    for (const auto& e : audit["submissions"]) {
      log.push_back({e["sequence"].get<std::size_t>(), io::grades_from_json(Json{{"grades", e["grades"]}})});
    }
    auto book = io::grades_from_json(first);
    book[changed] = 0;
    CHECK(service::replay(log) == book);

    auto [fcode, fb] = live.get(base + "/solutions/" + d.solutions[0].learner_id + "/feedback");
    CHECK(fcode == 200);
    CHECK(fb["steps"].size() >= 1);
    CHECK(live.get(base + "/solutions/nobody/feedback").first == 404);

    auto [gcode, graph] = live.get(base + "/graph?threshold=0.25");
    CHECK(gcode == 200);
    CHECK(graph["nodes"].size() == d.solutions.size());
  }

  TEST_CASE("identical requests give identical payloads") {
    const Dataset d = corpus();
    Live live;
    const std::string body = create_body(d, bayes_options());
    const std::string a = live.create(body);
    const std::string b = live.create(body);
    CHECK(a != b);
    for (const char* path : {"/clusters", "/representatives"}) {
      CHECK(live.get_raw("/analyses/" + a + path).second == live.get_raw("/analyses/" + b + path).second);
    }
  }

  TEST_CASE("concurrent readers see one snapshot") {
    const Dataset d = corpus();
    Live live;
    const std::string id = live.create(create_body(d, {{"method", "ap"}}));
    const std::string expected = live.get_raw("/analyses/" + id + "/clusters").second;
    std::vector<std::thread> readers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t) {
      readers.emplace_back([&] {
        httplib::Client c("127.0.0.1", live.port);
        for (int i = 0; i < 10; ++i) {
          auto r = c.Get("/analyses/" + id + "/clusters");
          if (!r || r->status != 200 || r->body != expected) ++mismatches;
        }
      });
    }
    for (auto& r : readers) r.join();
    CHECK(mismatches == 0);
  }

  TEST_CASE("cross-origin preflight") {
    Live live;
    auto r = live.client->Options("/analyses");
    REQUIRE(r);
    CHECK(r->status == 204);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
  }
}
