#include "mlp/service/service.hpp"

#include "mlp/error.hpp"
#include "mlp/io/graph.hpp"

#include "httplib.h"

#include <condition_variable>
#include <variant>
#include <optional>

namespace mlp::service {

using io::Json;

class Session {
 public:
  enum class State { Running, Done, Failed };

  std::string id;
  std::atomic<State> state{State::Running};
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> total{1};

  mutable std::mutex mu;
  mutable std::condition_variable finished;
  std::string error_kind;
  std::string error_message;
  std::shared_ptr<const Analysis> snapshot;
  std::map<std::string, double> book;
  std::vector<AuditEntry> log;
  std::optional<GradeReport> report;

  std::thread worker;
};

namespace {

Reply error_reply(int status, const std::string& kind, const std::string& message) {
  return {status, Json{{"error", {{"kind", kind}, {"message", message}}}}};
}

Reply from_error(const Error& e) {
  int status = 422;
  switch (e.kind()) {
    case ErrorKind::Schema: status = 400; break;
    case ErrorKind::MissingGrades: status = 409; break;
    case ErrorKind::IndexOutOfRange: status = 404; break;
    default: break;
  }
  return error_reply(status, to_string(e.kind()), e.what());
}

const char* state_name(Session::State s) {
  switch (s) {
    case Session::State::Running: return "running";
    case Session::State::Done: return "done";
    case Session::State::Failed: return "failed";
  }
  return "?";
}

Json status_json(const Session& s) {
  Json j;
  j["id"] = s.id;
  const auto state = s.state.load();
  j["state"] = state_name(state);
  j["progress"] = {{"done", s.done.load()}, {"total", s.total.load()}};
  if (state == Session::State::Failed) {
    std::lock_guard lock(s.mu);
    j["error"] = {{"kind", s.error_kind}, {"message", s.error_message}};
  }
  return j;
}

// The finished snapshot, or the reply explaining why there is none.
std::variant<std::shared_ptr<const Analysis>, Reply> ready(const Session& s) {
  switch (s.state.load()) {
    case Session::State::Running:
      return error_reply(409, "NotReady", "analysis " + s.id + " is still running");
    case Session::State::Failed: {
      std::lock_guard lock(s.mu);
      return error_reply(422, s.error_kind, s.error_message);
    }
    case Session::State::Done: break;
  }
  std::lock_guard lock(s.mu);
  return s.snapshot;
}

// Rejects model parameters that would only fail once the run has started.
void precheck(const Dataset& d, const AnalysisOptions& o) {
  const std::size_t n = d.solutions.size();
  switch (o.method) {
    case Method::Spectral:
      if (!o.k) throw Error(ErrorKind::InvalidArgument, "spectral clustering needs options.k");
      if (*o.k < 1 || *o.k > n) throw Error(ErrorKind::InvalidArgument, "options.k outside [1, N]");
      break;
    case Method::Affinity:
      if (!(o.affinity.damping >= 0.5 && o.affinity.damping < 1)) {
        throw Error(ErrorKind::InvalidArgument, "damping must lie in [0.5, 1)");
      }
      break;
    case Method::Bayes:
      if (n < 2) throw Error(ErrorKind::InvalidArgument, "the Bayesian model needs at least two solutions");
      break;
  }
}

}  // namespace

std::map<std::string, double> replay(const std::vector<AuditEntry>& log) {
  std::map<std::string, double> book;
  for (const auto& e : log) {
    for (const auto& [id, g] : e.grades) book[id] = g;
  }
  return book;
}

Service::Service() = default;

Service::~Service() {
  std::unique_lock lock(mu_);
  for (auto& [id, s] : sessions_) {
    if (s->worker.joinable()) s->worker.join();
  }
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Reply Service::create_analysis(const std::string& body) {
  Dataset dataset;
  AnalysisOptions options;
  try {
    const Json j = io::parse_json(body);
    if (!j.is_object()) throw SchemaError("$", "expected an object");
    if (!j.contains("dataset")) throw SchemaError("$.dataset", "missing");
    dataset = io::dataset_from_json(j["dataset"]);
    dataset.drop_blank();
    if (dataset.solutions.empty()) throw SchemaError("$.dataset.solutions", "no non-blank solutions");
    if (j.contains("options")) options = io::options_from_json(j["options"]);
    precheck(dataset, options);
  } catch (const Error& e) {
    return from_error(e);
  }

  auto session = std::make_shared<Session>();
  {
    std::unique_lock lock(mu_);
    session->id = "a" + std::to_string(next_id_++);
    sessions_[session->id] = session;
  }
  Session* s = session.get();
  s->worker = std::thread([s, dataset = std::move(dataset), options] {
    try {
      auto progress = [s](std::size_t done, std::size_t total) {
        s->total = total;
        s->done = done;
      };
      auto a = std::make_shared<const Analysis>(run_analysis(dataset, options, progress));
      std::lock_guard lock(s->mu);
      s->snapshot = std::move(a);
      s->done = s->total.load();
      s->state = Session::State::Done;
    } catch (const std::exception& e) {
      std::lock_guard lock(s->mu);
      const auto* err = dynamic_cast<const Error*>(&e);
      s->error_kind = err ? to_string(err->kind()) : "Internal";
      s->error_message = e.what();
      s->state = Session::State::Failed;
    }
    s->finished.notify_all();
  });
  return {202, status_json(*session)};
}

void Service::wait(const std::string& id) const {
  auto s = find(id);
  if (!s) return;
  std::unique_lock lock(s->mu);
  s->finished.wait(lock, [&] { return s->state.load() != Session::State::Running; });
}

Reply Service::status(const std::string& id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  return {200, status_json(*s)};
}

Reply Service::clusters(const std::string& id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  auto r = ready(*s);
  if (auto* reply = std::get_if<Reply>(&r)) return *reply;
  return {200, io::clusters_to_json(*std::get<0>(r))};
}

Reply Service::representatives(const std::string& id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  auto r = ready(*s);
  if (auto* reply = std::get_if<Reply>(&r)) return *reply;
  return {200, io::representatives_to_json(*std::get<0>(r))};
}

Reply Service::submit_grades(const std::string& id, const std::string& body) {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  auto r = ready(*s);
  if (auto* reply = std::get_if<Reply>(&r)) return *reply;
  const auto& a = *std::get<0>(r);
  try {
    const auto submitted = io::grades_from_json(io::parse_json(body));
    std::lock_guard lock(s->mu);
    auto merged = s->book;
    for (const auto& [sid, g] : submitted) merged[sid] = g;
    GradeReport report = grade_report(a, merged);
    s->book = std::move(merged);
    s->log.push_back({s->log.size() + 1, submitted});
    s->report = report;
    return {200, io::grade_report_to_json(report)};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Reply Service::grades(const std::string& id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  auto r = ready(*s);
  if (auto* reply = std::get_if<Reply>(&r)) return *reply;
  std::lock_guard lock(s->mu);
  if (!s->report) return error_reply(409, to_string(ErrorKind::MissingGrades), "no grades submitted yet");
  return {200, io::grade_report_to_json(*s->report)};
}

Reply Service::feedback(const std::string& id, const std::string& solution_id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  auto r = ready(*s);
  if (auto* reply = std::get_if<Reply>(&r)) return *reply;
  const auto& a = *std::get<0>(r);
  std::map<std::string, double> book;
  {
    std::lock_guard lock(s->mu);
    book = s->book;
  }
  try {
    if (a.options.method != Method::Bayes) {
      throw Error(ErrorKind::InvalidArgument, "feedback traces need a Bayesian analysis");
    }
    a.index_of(solution_id);
    return {200, io::feedback_to_json(a, solution_id, solution_feedback(a, book, solution_id))};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Reply Service::graph(const std::string& id, const std::string& threshold) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  double t = 0;
  std::size_t used = 0;
  try {
    t = std::stod(threshold, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != threshold.size() || !(t > 0 && t <= 1)) {
    return error_reply(400, to_string(ErrorKind::Schema), "threshold must be a number in (0, 1]");
  }
  auto r = ready(*s);
  if (auto* reply = std::get_if<Reply>(&r)) return *reply;
  std::optional<GradeReport> report;
  {
    std::lock_guard lock(s->mu);
    report = s->report;
  }
  return {200, io::graph_to_json(io::export_graph(*std::get<0>(r), t, report ? &*report : nullptr))};
}

std::vector<AuditEntry> Service::audit_log(const std::string& id) const {
  auto s = find(id);
  if (!s) return {};
  std::lock_guard lock(s->mu);
  return s->log;
}

Reply Service::audit(const std::string& id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "NotFound", "no analysis " + id);
  Json entries = Json::array();
  for (const auto& e : audit_log(id)) entries.push_back({{"sequence", e.sequence}, {"grades", io::grades_to_json(e.grades)["grades"]}});
  return {200, Json{{"id", id}, {"submissions", std::move(entries)}}};
}

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(io::dump(r.body), "application/json");
  };
  auto& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  srv.Post("/analyses", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.create_analysis(req.body));
  });
  srv.Get("/analyses/:id/status", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.status(req.path_params.at("id")));
  });
  srv.Get("/analyses/:id/clusters", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.clusters(req.path_params.at("id")));
  });
  srv.Get("/analyses/:id/representatives", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.representatives(req.path_params.at("id")));
  });
  srv.Post("/analyses/:id/grades", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.submit_grades(req.path_params.at("id"), req.body));
  });
  srv.Get("/analyses/:id/grades", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.grades(req.path_params.at("id")));
  });
  srv.Get("/analyses/:id/solutions/:sid/feedback", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.feedback(req.path_params.at("id"), req.path_params.at("sid")));
  });
  srv.Get("/analyses/:id/graph", [this, send](const httplib::Request& req, httplib::Response& res) {
    const std::string t = req.has_param("threshold") ? req.get_param_value("threshold") : "";
    send(res, service_.graph(req.path_params.at("id"), t));
  });
  srv.Get("/analyses/:id/audit", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.audit(req.path_params.at("id")));
  });
  srv.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send(res, error_reply(500, "Internal", e.what()));
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = server_->bind_to_any_port(host);
    if (p < 0) throw Error(ErrorKind::Io, "cannot bind " + host);
    return p;
  }
  if (!server_->bind_to_port(host, port)) throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { serve(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mlp::service
