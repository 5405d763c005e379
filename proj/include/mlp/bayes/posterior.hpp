#pragma once

#include "mlp/bayes/gibbs.hpp"

#include <Eigen/Core>

#include <map>
#include <vector>

namespace mlp::bayes {

struct PosteriorSummary {
  std::size_t k_hat = 0;
  Eigen::MatrixXd phi_hat;       // V x k_hat, columns sum to 1
  std::vector<std::size_t> z_hat;
  std::size_t l_max = 0;         // index into the trace samples
  std::size_t l_max_iteration = 0;
  std::size_t retained = 0;      // samples with K = k_hat
  std::map<std::size_t, std::size_t> k_counts;

  double k_hat_probability() const;
};

// K-hat is the most frequent K (ties to the smaller). Samples with K = K-hat
// are relabeled onto the highest-likelihood one by minimum-cost matching of
// column L1 distances, then averaged. Clusters are finally ordered by their
// Phi-hat columns (lexicographically, larger first) so the summary does not
// depend on how the chain happened to number them.
// Throws Error(EmptyTrace).
PosteriorSummary summarize_posterior(const std::vector<TraceSample>& samples);

// Minimum-cost perfect matching on a square cost matrix: result[r] is the
// column assigned to row r.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost);

}  // namespace mlp::bayes
