#include "mlp/bayes/grading.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlp::bayes {
namespace {

using Index = Eigen::Index;

void require_grades(const Eigen::MatrixXd& phi_hat, const std::vector<double>& grades) {
  if (static_cast<Index>(grades.size()) != phi_hat.cols()) {
    throw Error(ErrorKind::MissingGrades, "expected " + std::to_string(phi_hat.cols()) +
                                              " cluster grades, got " + std::to_string(grades.size()));
  }
  for (double g : grades) {
    if (!std::isfinite(g)) throw Error(ErrorKind::MissingGrades, "cluster grade is not a number");
  }
}

Eigen::VectorXd log_likelihoods(const Eigen::VectorXi& y, const Eigen::MatrixXd& phi_hat) {
  if (y.size() != phi_hat.rows()) throw Error(ErrorKind::InvalidArgument, "y and phi differ in length");
  if ((y.array() == 0).all()) throw Error(ErrorKind::InvalidArgument, "feature vector is all zero");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(phi_hat.cols());
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) == 0) continue;
    for (Index k = 0; k < phi_hat.cols(); ++k) out(k) += y(i) * std::log(phi_hat(i, k));
  }
  return out;
}

}  // namespace

cluster::RepresentativeSet select_representatives_b(const Eigen::MatrixXd& phi_hat,
                                                    const features::FeatureMatrix& y,
                                                    std::span<const std::size_t> labels) {
  if (phi_hat.rows() != y.y.rows()) {
    throw Error(ErrorKind::InvalidArgument, "phi and Y disagree on the vocabulary size");
  }
  if (!labels.empty() && static_cast<Index>(labels.size()) != y.y.cols()) {
    throw Error(ErrorKind::CountMismatch, "one label per solution expected");
  }
  std::vector<bool> occupied(static_cast<std::size_t>(phi_hat.cols()), false);
  for (std::size_t l : labels) {
    if (l < occupied.size()) occupied[l] = true;
  }
  cluster::RepresentativeSet out;
  out.method = cluster::RepresentativeMethod::Bayesian;
  out.indices.assign(static_cast<std::size_t>(phi_hat.cols()), 0);
  std::vector<double> best(static_cast<std::size_t>(phi_hat.cols()),
                           -std::numeric_limits<double>::infinity());
  for (Index j = 0; j < y.y.cols(); ++j) {
    const Eigen::VectorXd ll = log_likelihoods(y.y.col(j), phi_hat);
    for (Index k = 0; k < phi_hat.cols(); ++k) {
      const auto ku = static_cast<std::size_t>(k);
      if (occupied[ku] && labels[static_cast<std::size_t>(j)] != ku) continue;
      if (ll(k) > best[ku]) {
        best[ku] = ll(k);
        out.indices[ku] = static_cast<std::size_t>(j);
      }
    }
  }
  return out;
}

Eigen::VectorXd cluster_weights(const Eigen::VectorXi& y, const Eigen::MatrixXd& phi_hat) {
  Eigen::VectorXd ll = log_likelihoods(y, phi_hat);
  const double top = ll.maxCoeff();
  if (!std::isfinite(top)) {
    // no cluster can produce y; fall back to a flat weighting
    return Eigen::VectorXd::Constant(ll.size(), 1.0 / static_cast<double>(ll.size()));
  }
  Eigen::VectorXd w = (ll.array() - top).exp();
  return w / w.sum();
}

double grade_b(const Eigen::VectorXi& y, const Eigen::MatrixXd& phi_hat,
               const std::vector<double>& grades) {
  require_grades(phi_hat, grades);
  const Eigen::VectorXd w = cluster_weights(y, phi_hat);
  double g = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Index k = 0; k < w.size(); ++k) {
    g += w(k) * grades[k];
    lo = std::min(lo, grades[k]);
    hi = std::max(hi, grades[k]);
  }
  return std::clamp(g, lo, hi);  // rounding can overshoot by an ulp
}

double round_grade(double g) { return std::round(g); }

FeedbackTrace feedback_trace(const features::SolutionFeatures& solution,
                             const Eigen::MatrixXd& phi_hat, const std::vector<double>& grades,
                             double g_max, double tolerance, features::Encoding encoding) {
  require_grades(phi_hat, grades);
  FeedbackTrace out;
  const auto v = static_cast<std::size_t>(phi_hat.rows());
  for (std::size_t step = 1; step <= solution.length(); ++step) {
    const Eigen::VectorXi prefix = features::prefix_vector(solution, step, v, encoding);
    const Eigen::VectorXd w = cluster_weights(prefix, phi_hat);
    FeedbackStep s;
    s.expected_grade = grade_b(prefix, phi_hat, grades);
    for (Index k = 0; k < w.size(); ++k) {
      if (grades[k] < g_max) s.p_incorrect += w(k);
    }
    s.p_incorrect = std::clamp(s.p_incorrect, 0.0, 1.0);
    s.alert = s.expected_grade < g_max - tolerance;
    if (s.alert && !out.first_alert) out.first_alert = step;
    out.steps.push_back(s);
  }
  return out;
}

}  // namespace mlp::bayes
