#include "mlp/pipeline.hpp"

#include "mlp/cluster/spectral.hpp"
#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>

namespace mlp {

std::string to_string(Method m) {
  switch (m) {
    case Method::Spectral: return "sc";
    case Method::Affinity: return "ap";
    case Method::Bayes: return "bayes";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "sc" || s == "spectral") return Method::Spectral;
  if (s == "ap" || s == "affinity") return Method::Affinity;
  if (s == "bayes" || s == "b") return Method::Bayes;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(s) + "' (sc, ap, bayes)");
}

std::size_t Analysis::index_of(const std::string& id) const {
  for (std::size_t j = 0; j < size(); ++j) {
    if (features.solutions[j].learner_id == id) return j;
  }
  throw Error(ErrorKind::IndexOutOfRange, "no solution with id '" + id + "'");
}

std::vector<std::string> Analysis::representative_ids() const {
  std::vector<std::string> out;
  for (std::size_t j : representatives.indices) {
    if (std::find(out.begin(), out.end(), id(j)) == out.end()) out.push_back(id(j));
  }
  return out;
}

namespace {

Analysis prepare(const Dataset& dataset, const AnalysisOptions& options) {
  Analysis a;
  a.dataset = dataset;
  a.dataset.drop_blank();
  a.options = options;
  a.options.affinity.seed = options.seed;
  a.options.bayes.seed = options.seed;
  a.features = features::build_matrix(a.dataset.solutions, dataset.question.simplification,
                                      options.encoding);
  a.similarity = cluster::similarity(a.features.matrix);
  return a;
}

void summarize(Analysis& a, bayes::GibbsTrace trace) {
  a.trace = std::move(trace);
  a.posterior = bayes::summarize_posterior(a.trace->samples);
  a.assignment.labels = a.posterior->z_hat;
  a.assignment.k = a.posterior->k_hat;
  a.representatives = bayes::select_representatives_b(a.posterior->phi_hat, a.features.matrix,
                                                      a.posterior->z_hat);
}

}  // namespace

Analysis run_analysis(const Dataset& dataset, const AnalysisOptions& options,
                      const bayes::ProgressFn& progress) {
  Analysis a = prepare(dataset, options);
  const std::size_t n = a.size();

  switch (options.method) {
    case Method::Spectral: {
      if (!options.k) throw Error(ErrorKind::InvalidArgument, "spectral clustering needs K");
      if (*options.k < 1 || *options.k > n) {
        throw Error(ErrorKind::InvalidArgument,
                    "K = " + std::to_string(*options.k) + " outside [1, " + std::to_string(n) + "]");
      }
      a.assignment = cluster::spectral_cluster(a.similarity, *options.k, options.seed);
      a.representatives = cluster::select_representatives_s(a.similarity, a.assignment, options.seed);
      break;
    }
    case Method::Affinity: {
      auto ap = options.affinity;
      ap.seed = options.seed;
      auto r = cluster::affinity_propagation(a.similarity, ap);
      a.assignment = std::move(r.assignment);
      a.converged = r.converged;
      a.representatives = cluster::select_representatives_s(a.similarity, a.assignment, options.seed);
      break;
    }
    case Method::Bayes: {
      auto hp = options.bayes;
      hp.seed = options.seed;
      summarize(a, bayes::gibbs_run(a.features.matrix, hp, progress));
      break;
    }
  }
  return a;
}

Analysis resume_analysis(const Dataset& dataset, const AnalysisOptions& options, bayes::GibbsTrace trace,
                         std::optional<std::size_t> iterations, const bayes::ProgressFn& progress) {
  if (options.method != Method::Bayes) {
    throw Error(ErrorKind::InvalidArgument, "only Bayesian analyses can resume from a trace");
  }
  Analysis a = prepare(dataset, options);
  if (trace.num_solutions != a.size() || trace.num_features != a.features.matrix.num_features()) {
    throw Error(ErrorKind::InvalidArgument, "trace does not match the dataset");
  }
  a.options.seed = trace.hyperparams.seed;
  a.options.bayes = trace.hyperparams;
  summarize(a, bayes::gibbs_resume(a.features.matrix, std::move(trace), iterations, progress));
  a.options.bayes = a.trace->hyperparams;
  return a;
}

namespace {

// Grade of every cluster from its representative's instructor grade.
std::vector<double> cluster_grades(const Analysis& a, const std::map<std::string, double>& grades) {
  for (const auto& [id, g] : grades) {
    const std::size_t j = a.index_of(id);
    const auto& reps = a.representatives.indices;
    if (std::find(reps.begin(), reps.end(), j) == reps.end()) {
      throw Error(ErrorKind::InvalidArgument, "solution '" + id + "' is not a representative");
    }
    if (!std::isfinite(g) || g < 0 || g > a.question().g_max) {
      throw Error(ErrorKind::InvalidArgument, "grade for '" + id + "' outside [0, g_max]");
    }
  }
  std::vector<double> out;
  std::vector<std::string> missing;
  for (std::size_t j : a.representatives.indices) {
    auto it = grades.find(a.id(j));
    if (it == grades.end()) {
      missing.push_back(a.id(j));
      out.push_back(0);
    } else {
      out.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing grades for representatives:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorKind::MissingGrades, msg);
  }
  return out;
}

}  // namespace

GradeReport grade_report(const Analysis& a, const std::map<std::string, double>& grades) {
  GradeReport r;
  r.method = a.options.method;
  r.g_max = a.question().g_max;
  r.cluster_grades = cluster_grades(a, grades);
  for (std::size_t j : a.representatives.shared()) r.shared_representatives.push_back(a.id(j));

  std::vector<double> g;
  if (a.options.method == Method::Bayes) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      g.push_back(bayes::grade_b(a.features.matrix.y.col(static_cast<Eigen::Index>(j)),
                                 a.posterior->phi_hat, r.cluster_grades));
    }
  } else {
    std::map<std::size_t, double> by_cluster;
    for (std::size_t k = 0; k < r.cluster_grades.size(); ++k) by_cluster[k] = r.cluster_grades[k];
    g = cluster::propagate_grades_s(a.assignment, by_cluster);
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    GradeEntry e;
    e.id = a.id(j);
    e.cluster = a.assignment.labels[j];
    auto it = grades.find(e.id);
    e.representative = it != grades.end();
    e.grade = e.representative ? it->second : g[j];
    e.rounded = bayes::round_grade(e.grade);
    r.entries.push_back(std::move(e));
  }
  return r;
}

bayes::FeedbackTrace solution_feedback(const Analysis& a, const std::map<std::string, double>& grades,
                                       const std::string& solution_id) {
  if (a.options.method != Method::Bayes || !a.posterior) {
    throw Error(ErrorKind::InvalidArgument, "feedback traces need a Bayesian analysis");
  }
  const std::size_t j = a.index_of(solution_id);
  return bayes::feedback_trace(a.features.solutions[j], a.posterior->phi_hat, cluster_grades(a, grades),
                               a.question().g_max, a.options.feedback_tolerance,
                               a.features.matrix.encoding);
}

}  // namespace mlp
