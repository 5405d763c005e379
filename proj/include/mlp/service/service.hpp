#pragma once

// Analysis sessions behind an HTTP API. A session owns an immutable analysis
// snapshot and an append-only log of grade submissions; the current grade
// book is the fold of that log.

#include "mlp/io/reports.hpp"
#include "mlp/pipeline.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace mlp::service {

struct Reply {
  int status = 200;
  io::Json body;
};

struct AuditEntry {
  std::size_t sequence = 0;  // 1-based
  std::map<std::string, double> grades;
};

// Replays accepted submissions in order; later grades overwrite earlier ones.
std::map<std::string, double> replay(const std::vector<AuditEntry>& log);

class Session;

// Transport-independent request handlers. Error replies carry
// {"error": {"kind": ..., "message": ...}} with status 400 (schema), 404
// (unknown session or solution), 409 (incomplete grades or analysis not
// finished) or 422 (model failure, out-of-range value).
class Service {
 public:
  Service();
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Body: {"dataset": <mlp-dataset/1>, "options": {"method": ..., ...}}.
  // Validates synchronously, then runs the model on a background thread and
  // answers 202 with the session id.
  Reply create_analysis(const std::string& body);
  Reply status(const std::string& id) const;
  Reply clusters(const std::string& id) const;
  Reply representatives(const std::string& id) const;
  // Body: {"grades": {id: g}}, merged into the current grade book. The merged
  // book must cover every representative; rejected submissions change nothing.
  Reply submit_grades(const std::string& id, const std::string& body);
  Reply grades(const std::string& id) const;
  Reply feedback(const std::string& id, const std::string& solution_id) const;
  Reply graph(const std::string& id, const std::string& threshold) const;
  Reply audit(const std::string& id) const;

  // Blocks until the session's model run has finished.
  void wait(const std::string& id) const;
  std::vector<AuditEntry> audit_log(const std::string& id) const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;

  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;
};

// Binds the handlers to HTTP routes:
//   POST /analyses                       GET /analyses/{id}/status
//   GET  /analyses/{id}/clusters         GET /analyses/{id}/representatives
//   POST /analyses/{id}/grades           GET /analyses/{id}/grades
//   GET  /analyses/{id}/solutions/{sid}/feedback
//   GET  /analyses/{id}/graph?threshold=T
//   GET  /analyses/{id}/audit
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Port 0 picks a free port. Returns the bound port; throws Error(Io).
  int bind(const std::string& host, int port);
  void serve();  // blocks until stop()
  void start();  // serve() on a background thread
  void stop();

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace mlp::service
