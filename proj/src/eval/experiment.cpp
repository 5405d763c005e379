#include "mlp/eval/experiment.hpp"

#include "mlp/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace mlp::eval {

std::string to_string(ExperimentMethod m) {
  switch (m) {
    case ExperimentMethod::Random: return "rs";
    case ExperimentMethod::Spectral: return "sc";
    case ExperimentMethod::Affinity: return "ap";
    case ExperimentMethod::Bayes: return "bayes";
  }
  return "?";
}

ExperimentMethod parse_experiment_method(std::string_view s) {
  if (s == "rs" || s == "random") return ExperimentMethod::Random;
  if (s == "sc" || s == "spectral") return ExperimentMethod::Spectral;
  if (s == "ap" || s == "affinity") return ExperimentMethod::Affinity;
  if (s == "bayes" || s == "b") return ExperimentMethod::Bayes;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(s) + "' (rs, sc, ap, bayes)");
}

namespace {

using Clock = std::chrono::steady_clock;

// Reveals representative grades through the oracle, propagates, and scores.
ExperimentRow score_analysis(const Analysis& a, GradeOracle& oracle, const std::vector<double>& truth,
                             bool round) {
  const auto reps = a.representative_ids();
  oracle.begin_run(reps.size());
  std::map<std::string, double> grades;
  std::set<std::size_t> graded;
  for (const auto& id : reps) {
    const std::size_t j = a.index_of(id);
    grades[id] = oracle.reveal(j);
    graded.insert(j);
  }
  const GradeReport report = grade_report(a, grades);
  std::vector<double> estimated;
  for (const auto& e : report.entries) estimated.push_back(round ? e.rounded : e.grade);

  ExperimentRow row;
  row.clusters = a.representatives.indices.size();
  row.graded = graded.size();
  row.auto_graded = a.size() - graded.size();
  if (row.auto_graded > 0) row.mae = mae(estimated, truth, graded);
  return row;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentOptions& options) {
  const std::vector<double> truth = dataset.truth();
  if (options.k_min < 1 || options.k_min > options.k_max) {
    throw Error(ErrorKind::InvalidArgument, "K range must satisfy 1 <= min <= max");
  }
  GradeOracle oracle(truth);

  AnalysisOptions base;
  base.affinity = options.affinity;
  base.bayes = options.bayes;

  ExperimentReport report;
  report.question_id = dataset.question.id;

  auto timed = [&](ExperimentRow row, Clock::time_point t0) {
    if (options.record_time) row.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return row;
  };

  const auto features = features::build_matrix(dataset.solutions, dataset.question.simplification);
  const auto s = cluster::similarity(features.matrix);
  const std::size_t n = features.solutions.size();
  report.n = n;
  report.v = features.matrix.num_features();
  if (n != truth.size()) throw Error(ErrorKind::CountMismatch, "blank solutions must be dropped first");

  for (ExperimentMethod m : options.methods) {
    for (std::uint64_t seed : options.seeds) {
      AnalysisOptions opt = base;
      opt.seed = seed;
      switch (m) {
        case ExperimentMethod::Random:
          for (std::size_t k = options.k_min; k <= std::min(options.k_max, n - 1); ++k) {
            const auto t0 = Clock::now();
            const auto r = random_baseline(s, k, oracle, truth, seed, options.baseline_trials);
            ExperimentRow row;
            row.clusters = k;
            row.graded = k;
            row.auto_graded = n - k;
            row.mae = r.mae;
            row.method = m;
            row.seed = seed;
            report.rows.push_back(timed(row, t0));
          }
          break;
        case ExperimentMethod::Spectral:
          opt.method = Method::Spectral;
          for (std::size_t k = options.k_min; k <= std::min(options.k_max, n); ++k) {
            const auto t0 = Clock::now();
            opt.k = k;
            auto row = score_analysis(run_analysis(dataset, opt), oracle, truth, false);
            row.method = m;
            row.seed = seed;
            report.rows.push_back(timed(row, t0));
          }
          break;
        case ExperimentMethod::Affinity:
        case ExperimentMethod::Bayes: {
          const auto t0 = Clock::now();
          const bool bayes = m == ExperimentMethod::Bayes;
          opt.method = bayes ? Method::Bayes : Method::Affinity;
          auto row = score_analysis(run_analysis(dataset, opt), oracle, truth, bayes);
          row.method = m;
          row.seed = seed;
          report.rows.push_back(timed(row, t0));
          break;
        }
      }
    }
  }
  report.max_revealed_per_run = oracle.max_revealed_per_run();
  return report;
}

namespace {

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string report_text(const ExperimentReport& r) {
  std::ostringstream out;
  out << "question " << r.question_id << "  N=" << r.n << "  V=" << r.v << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %6s %4s %6s %6s %10s %10s\n", "method", "seed", "K", "graded",
                "auto", "mae", "seconds");
  out << line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-6s %6llu %4zu %6zu %6zu %10s %10s\n", to_string(row.method).c_str(),
                  static_cast<unsigned long long>(row.seed), row.clusters, row.graded, row.auto_graded,
                  row.mae ? fixed(*row.mae).c_str() : "-", row.seconds ? fixed(*row.seconds, 3).c_str() : "-");
    out << line;
  }
  out << "max grades revealed per run: " << r.max_revealed_per_run << "\n";
  return out.str();
}

std::string report_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "mlp-experiment/1";
  j["question_id"] = r.question_id;
  j["n"] = r.n;
  j["v"] = r.v;
  j["max_revealed_per_run"] = r.max_revealed_per_run;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json e;
    e["method"] = to_string(row.method);
    e["seed"] = row.seed;
    e["k"] = row.clusters;
    e["graded"] = row.graded;
    e["auto_graded"] = row.auto_graded;
    e["mae"] = row.mae ? nlohmann::ordered_json(*row.mae) : nlohmann::ordered_json(nullptr);
    if (row.seconds) e["seconds"] = *row.seconds;
    j["rows"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "method,seed,k,graded,auto_graded,mae,seconds\n";
  for (const auto& row : r.rows) {
    out << to_string(row.method) << ',' << row.seed << ',' << row.clusters << ',' << row.graded << ','
        << row.auto_graded << ',' << (row.mae ? fixed(*row.mae, 9) : "") << ','
        << (row.seconds ? fixed(*row.seconds, 3) : "") << '\n';
  }
  return out.str();
}

}  // namespace mlp::eval
