#pragma once

#include "mlp/cluster/assignment.hpp"
#include "mlp/cluster/similarity.hpp"

#include <cstdint>
#include <optional>

namespace mlp::cluster {

struct AffinityOptions {
  std::optional<double> preference;  // default: median off-diagonal similarity
  double damping = 0.9;
  std::size_t max_iterations = 1000;
  std::size_t convergence_iterations = 50;
  std::uint64_t seed = 0;  // drives the tie-breaking jitter added to S
};

struct AffinityResult {
  ClusterAssignment assignment;
  std::vector<std::size_t> exemplars;  // exemplars[k] is the exemplar of cluster k
  std::size_t iterations = 0;
  bool converged = false;
};

// Responsibility/availability message passing. When no exemplar emerges the
// point with the largest self-evidence becomes the only exemplar and
// `converged` is false. Throws Error(InvalidArgument) for an empty S or a
// damping outside [0.5, 1).
AffinityResult affinity_propagation(const SimilarityMatrix& s, const AffinityOptions& options = {});

}  // namespace mlp::cluster
