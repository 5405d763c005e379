#pragma once

#include "mlp/cluster/assignment.hpp"
#include "mlp/cluster/similarity.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace mlp::cluster {

enum class RepresentativeMethod { Similarity, Bayesian };

// One solution index per cluster; indices[k] represents cluster k. Under the
// Bayesian rule two clusters may share a solution.
struct RepresentativeSet {
  std::vector<std::size_t> indices;
  RepresentativeMethod method = RepresentativeMethod::Similarity;

  // Solutions chosen by more than one cluster.
  std::vector<std::size_t> shared() const;
};

std::string to_string(RepresentativeMethod m);

// Per cluster, the member with the largest total similarity to all solutions;
// near-ties (relative 1e-12) are broken uniformly at random from `seed`.
RepresentativeSet select_representatives_s(const SimilarityMatrix& s,
                                           const ClusterAssignment& assignment,
                                           std::uint64_t seed);

// Every solution inherits the grade of its cluster.
// Throws Error(MissingClusterGrade) if a cluster has no grade.
std::vector<double> propagate_grades_s(const ClusterAssignment& assignment,
                                       const std::map<std::size_t, double>& cluster_grades);

}  // namespace mlp::cluster
