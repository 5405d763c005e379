#pragma once

#include "mlp/cluster/representatives.hpp"
#include "mlp/features.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace mlp::bayes {

// Per cluster, the solution whose column is most likely under that cluster's
// parameters (lowest index on ties). With `labels`, candidates for cluster k
// are its members; a cluster without members, or no labels at all, searches
// every solution, so two clusters may then pick the same one.
cluster::RepresentativeSet select_representatives_b(const Eigen::MatrixXd& phi_hat,
                                                    const features::FeatureMatrix& y,
                                                    std::span<const std::size_t> labels = {});

// Instructor grades per cluster averaged with weights p(y | phi_k).
// Throws Error(MissingGrades) unless there is one finite grade per column of
// phi_hat, Error(InvalidArgument) for an all-zero y.
double grade_b(const Eigen::VectorXi& y, const Eigen::MatrixXd& phi_hat,
               const std::vector<double>& grades);

// Posterior cluster weights p(k | y), normalized in log space.
Eigen::VectorXd cluster_weights(const Eigen::VectorXi& y, const Eigen::MatrixXd& phi_hat);

// Nearest integer, halves away from zero.
double round_grade(double g);

struct FeedbackStep {
  double expected_grade = 0;
  double p_incorrect = 0;  // mass on clusters graded below full credit
  bool alert = false;
};

struct FeedbackTrace {
  std::vector<FeedbackStep> steps;  // steps[v - 1] covers the first v expressions
  std::optional<std::size_t> first_alert;  // 1-based expression index
};

// Expected grade after each prefix of the solution; an alert is raised when it
// drops below g_max - tolerance. Throws Error(MissingGrades).
FeedbackTrace feedback_trace(const features::SolutionFeatures& solution,
                             const Eigen::MatrixXd& phi_hat, const std::vector<double>& grades,
                             double g_max, double tolerance = 0.5,
                             features::Encoding encoding = features::Encoding::Binary);

}  // namespace mlp::bayes
