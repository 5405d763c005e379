#pragma once

#include "mlp/cluster/assignment.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace mlp::cluster {

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
};

struct KMeansResult {
  ClusterAssignment assignment;
  Eigen::MatrixXd centers;  // k x d
  double inertia = 0;
};

// Lloyd iterations from k-means++ seeding on the rows of `points`; the best
// restart by inertia wins. Every returned cluster is non-empty.
// Throws Error(InvalidArgument) unless 1 <= k <= points.rows().
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace mlp::cluster
