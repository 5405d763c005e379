#pragma once

// Building blocks of the CRP mixture of multinomials. All probabilities are
// returned as natural logarithms, and the multinomial coefficient is left out
// everywhere so that occupied-cluster and new-cluster terms stay comparable.

#include "mlp/features.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mlp::bayes {

using Rng = std::mt19937_64;

// log prod_i phi_i^{y_i}. Throws Error(InvalidArgument) for an all-zero y or a
// size mismatch.
double multinomial_log_likelihood(const Eigen::VectorXi& y, const Eigen::VectorXd& phi);
// Same, from nonzero entries of y and log(phi).
double multinomial_log_likelihood(const features::SparseColumn& y, const Eigen::VectorXd& log_phi);

struct CrpMasses {
  std::vector<double> occupied;  // one entry per occupied cluster
  double fresh = 0;              // new cluster
};

// Prior of solution j joining each occupied cluster or a new one, given the
// other N-1 assignments. Throws Error(CountMismatch) if the sizes do not sum to
// n_total - 1, Error(InvalidArgument) unless alpha > 0.
CrpMasses crp_conditional(std::span<const std::size_t> sizes_without_j, std::size_t n_total,
                          double alpha);

// log of the Dirichlet(beta)-multinomial marginal of y over a V-category
// simplex. Throws Error(InvalidArgument) unless beta > 0.
double new_cluster_log_marginal(const features::SparseColumn& y, std::size_t vocabulary_size,
                                double beta);
double new_cluster_log_marginal(const Eigen::VectorXi& y, double beta);

// Escobar-West auxiliary-variable draw of the CRP concentration under a
// Gamma(shape, rate) prior.
double sample_alpha(std::size_t k, std::size_t n, double alpha_old, double prior_shape,
                    double prior_rate, Rng& rng);

struct BetaOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-8;  // relative change
  double beta_min = 1e-6;
  double beta_max = 1e6;
};

struct BetaUpdate {
  double beta = 1;
  std::size_t iterations = 0;
  bool converged = false;
  bool capped = false;   // hit beta_max
  bool floored = false;  // hit beta_min
};

// Fixed-point maximization of the symmetric Dirichlet-multinomial evidence of
// the per-cluster counts (columns of `counts`, V x K). All-zero counts return
// beta_old unchanged.
BetaUpdate update_beta(const Eigen::MatrixXd& counts, double beta_old, const BetaOptions& options = {});

// log evidence of `counts` under a symmetric Dirichlet(beta) prior per column.
double dirichlet_multinomial_log_evidence(const Eigen::MatrixXd& counts, double beta);

// log of a Dirichlet(params) draw, computed without underflow for tiny params.
Eigen::VectorXd sample_log_dirichlet(const Eigen::VectorXd& params, Rng& rng);

}  // namespace mlp::bayes
