#pragma once

#include "mlp/bayes/model.hpp"
#include "mlp/features.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mlp::bayes {

struct ModelHyperparams {
  double alpha_shape = 1;  // Gamma prior on alpha
  double alpha_rate = 1;
  double alpha_init = 1;
  double beta_init = 1;
  std::size_t iterations = 10000;
  std::size_t burn_in = 2000;
  std::uint64_t seed = 0;
  std::optional<std::size_t> init_clusters;  // default ceil(N / 10)
  double alpha_max = 1e3;
  BetaOptions beta;
  bool check_invariants = false;  // recount from scratch after every sweep

  // Throws Error(InvalidArgument) if a value is out of range.
  void validate() const;
};

// Mutable sampler state. Cluster k owns counts.col(k), log_phi.col(k) and
// sizes[k]; labels are dense in [0, K).
struct GibbsState {
  std::vector<std::size_t> z;
  std::vector<std::size_t> sizes;
  Eigen::MatrixXd counts;   // V x K, n_{i,k}
  Eigen::MatrixXd log_phi;  // V x K
  double alpha = 1;
  double beta = 1;

  std::size_t k() const noexcept { return sizes.size(); }
  Eigen::MatrixXd phi() const { return log_phi.array().exp().matrix(); }
};

// Snapshot of one retained iteration.
struct TraceSample {
  std::size_t iteration = 0;
  std::vector<std::size_t> z;
  Eigen::MatrixXd phi;  // V x K
  std::size_t k = 0;
  double alpha = 0;
  double beta = 0;
  double log_likelihood = 0;
};

// Everything needed to continue a chain exactly where it stopped.
struct GibbsCheckpoint {
  std::size_t completed = 0;  // sweeps done
  std::vector<std::size_t> z;
  Eigen::MatrixXd log_phi;
  double alpha = 1;
  double beta = 1;
  std::string rng_state;
};

struct GibbsDiagnostics {
  std::size_t alpha_capped = 0;
  std::size_t beta_capped = 0;
  std::size_t beta_floored = 0;
  bool non_mixing = false;  // every retained sample had one cluster per solution
};

struct GibbsTrace {
  ModelHyperparams hyperparams;
  std::size_t num_solutions = 0;
  std::size_t num_features = 0;
  std::vector<std::size_t> k_history;  // K after every sweep, burn-in included
  std::vector<TraceSample> samples;    // post burn-in sweeps
  GibbsDiagnostics diagnostics;
  GibbsCheckpoint checkpoint;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Runs hp.iterations sweeps. Throws Error(InvalidArgument) for fewer than two
// solutions.
GibbsTrace gibbs_run(const features::FeatureMatrix& y, const ModelHyperparams& hp,
                     const ProgressFn& progress = {});

// Continues `trace` from its checkpoint up to trace.hyperparams.iterations
// (optionally raised to `iterations`). The result is identical to an
// uninterrupted run.
GibbsTrace gibbs_resume(const features::FeatureMatrix& y, GibbsTrace trace,
                        std::optional<std::size_t> iterations = std::nullopt,
                        const ProgressFn& progress = {});

// Sum over solutions of the multinomial log-likelihood under their cluster.
double data_log_likelihood(const features::FeatureMatrix& y, const std::vector<std::size_t>& z,
                           const Eigen::MatrixXd& log_phi);

}  // namespace mlp::bayes
