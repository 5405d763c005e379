#include "mlp/bayes/gibbs.hpp"

#include "mlp/cluster/kmeans.hpp"
#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mlp::bayes {

void ModelHyperparams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
  };
  require(alpha_shape > 0 && alpha_rate > 0, "alpha prior parameters must be positive");
  require(alpha_init > 0 && beta_init > 0, "initial alpha and beta must be positive");
  require(iterations >= 1, "iterations must be positive");
  require(burn_in < iterations, "burn_in must be smaller than iterations");
  require(alpha_max > 0, "alpha_max must be positive");
  require(beta.beta_min > 0 && beta.beta_min < beta.beta_max, "invalid beta bounds");
  require(!init_clusters || *init_clusters >= 1, "init_clusters must be positive");
}

double data_log_likelihood(const features::FeatureMatrix& y, const std::vector<std::size_t>& z,
                           const Eigen::MatrixXd& log_phi) {
  double out = 0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    out += multinomial_log_likelihood(y.column(j), log_phi.col(static_cast<Eigen::Index>(z[j])));
  }
  return out;
}

namespace {

using Index = Eigen::Index;

class Sampler {
 public:
  Sampler(const features::FeatureMatrix& y, GibbsTrace trace)
      : y_(y), trace_(std::move(trace)), hp_(trace_.hyperparams) {
    for (std::size_t j = 0; j < y.num_solutions(); ++j) cols_.push_back(y.column(j));
  }

  void start() {
    const std::size_t n = y_.num_solutions();
    rng_.seed(hp_.seed);
    const std::size_t k0 = std::min(n, hp_.init_clusters.value_or((n + 9) / 10));
    const Eigen::MatrixXd points = (y_.y.array() != 0).cast<double>().matrix().transpose();
    auto km = cluster::kmeans(points, k0, hp_.seed);
    st_.alpha = hp_.alpha_init;
    st_.beta = hp_.beta_init;
    rebuild(km.assignment.labels);
    const double vb = static_cast<double>(y_.num_features()) * st_.beta;
    st_.log_phi.resize(st_.counts.rows(), st_.counts.cols());
    for (Index k = 0; k < st_.counts.cols(); ++k) {
      st_.log_phi.col(k) =
          ((st_.counts.col(k).array() + st_.beta) / (st_.counts.col(k).sum() + vb)).log();
    }
  }

  void restore() {
    const auto& cp = trace_.checkpoint;
    std::istringstream in(cp.rng_state);
    in >> rng_;
    if (!in) throw Error(ErrorKind::InvalidArgument, "corrupt rng state in checkpoint");
    st_.alpha = cp.alpha;
    st_.beta = cp.beta;
    rebuild(cp.z);
    if (cp.log_phi.rows() != st_.counts.rows() || cp.log_phi.cols() != st_.counts.cols()) {
      throw Error(ErrorKind::InvalidArgument, "checkpoint parameters do not match its labels");
    }
    st_.log_phi = cp.log_phi;
  }

  GibbsTrace run(std::size_t from, std::size_t to, const ProgressFn& progress) {
    for (std::size_t it = from; it < to; ++it) {
      sweep();
      if (hp_.check_invariants) check();
      trace_.k_history.push_back(st_.k());
      if (it >= hp_.burn_in) record(it);
      if (progress) progress(it + 1, to);
    }
    trace_.diagnostics.non_mixing = !trace_.samples.empty();
    for (const auto& s : trace_.samples) {
      if (s.k != trace_.num_solutions) trace_.diagnostics.non_mixing = false;
    }
    auto& cp = trace_.checkpoint;
    cp.completed = to;
    cp.z = st_.z;
    cp.log_phi = st_.log_phi;
    cp.alpha = st_.alpha;
    cp.beta = st_.beta;
    std::ostringstream out;
    out << rng_;
    cp.rng_state = out.str();
    return std::move(trace_);
  }

 private:
  void rebuild(const std::vector<std::size_t>& labels) {
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    st_.z = labels;
    st_.sizes.assign(k, 0);
    st_.counts = Eigen::MatrixXd::Zero(static_cast<Index>(y_.num_features()), static_cast<Index>(k));
    for (std::size_t j = 0; j < labels.size(); ++j) add(j, labels[j]);
  }

  void add(std::size_t j, std::size_t k) {
    st_.z[j] = k;
    ++st_.sizes[k];
    for (const auto& [row, c] : cols_[j]) st_.counts(static_cast<Index>(row), static_cast<Index>(k)) += c;
  }

  void remove(std::size_t j) {
    const std::size_t k = st_.z[j];
    --st_.sizes[k];
    for (const auto& [row, c] : cols_[j]) st_.counts(static_cast<Index>(row), static_cast<Index>(k)) -= c;
    if (st_.sizes[k] == 0) drop(k);
  }

  // The last cluster moves into the emptied slot.
  void drop(std::size_t k) {
    const std::size_t last = st_.k() - 1;
    if (k != last) {
      st_.sizes[k] = st_.sizes[last];
      st_.counts.col(static_cast<Index>(k)) = st_.counts.col(static_cast<Index>(last));
      st_.log_phi.col(static_cast<Index>(k)) = st_.log_phi.col(static_cast<Index>(last));
      for (auto& label : st_.z) {
        if (label == last) label = k;
      }
    }
    st_.sizes.pop_back();
    st_.counts.conservativeResize(Eigen::NoChange, static_cast<Index>(last));
    st_.log_phi.conservativeResize(Eigen::NoChange, static_cast<Index>(last));
  }

  std::size_t open(const Eigen::VectorXd& log_phi) {
    const auto k = static_cast<Index>(st_.k());
    st_.sizes.push_back(0);
    st_.counts.conservativeResize(Eigen::NoChange, k + 1);
    st_.counts.col(k).setZero();
    st_.log_phi.conservativeResize(Eigen::NoChange, k + 1);
    st_.log_phi.col(k) = log_phi;
    return static_cast<std::size_t>(k);
  }

  void sweep() {
    const std::size_t n = cols_.size();
    const std::size_t v = y_.num_features();
    std::vector<double> fresh(n);
    for (std::size_t j = 0; j < n; ++j) fresh[j] = new_cluster_log_marginal(cols_[j], v, st_.beta);

    // 1: reassign every solution
    std::vector<double> w;
    for (std::size_t j = 0; j < n; ++j) {
      remove(j);
      const std::size_t k = st_.k();
      w.resize(k + 1);
      for (std::size_t c = 0; c < k; ++c) {
        w[c] = std::log(static_cast<double>(st_.sizes[c])) +
               multinomial_log_likelihood(cols_[j], st_.log_phi.col(static_cast<Index>(c)));
      }
      w[k] = std::log(st_.alpha) + fresh[j];
      const double top = *std::max_element(w.begin(), w.end());
      double total = 0;
      for (auto& x : w) total += (x = std::exp(x - top));
      double u = std::uniform_real_distribution<double>(0.0, total)(rng_);
      std::size_t pick = k;
      for (std::size_t c = 0; c <= k; ++c) {
        u -= w[c];
        if (u < 0) {
          pick = c;
          break;
        }
      }
      if (pick == k) {
        Eigen::VectorXd params = Eigen::VectorXd::Constant(static_cast<Index>(v), st_.beta);
        for (const auto& [row, c] : cols_[j]) params(static_cast<Index>(row)) += c;
        pick = open(sample_log_dirichlet(params, rng_));
      }
      add(j, pick);
    }

    // 2: cluster parameters from their posteriors
    for (Index k = 0; k < st_.counts.cols(); ++k) {
      st_.log_phi.col(k) = sample_log_dirichlet(st_.counts.col(k).array() + st_.beta, rng_);
    }

    // 3: concentration
    st_.alpha = sample_alpha(st_.k(), n, st_.alpha, hp_.alpha_shape, hp_.alpha_rate, rng_);
    if (st_.alpha > hp_.alpha_max) {
      st_.alpha = hp_.alpha_max;
      ++trace_.diagnostics.alpha_capped;
    }

    // 4: Dirichlet smoothing
    const auto b = update_beta(st_.counts, st_.beta, hp_.beta);
    st_.beta = b.beta;
    trace_.diagnostics.beta_capped += b.capped;
    trace_.diagnostics.beta_floored += b.floored;
  }

  void check() const {
    const std::size_t k = st_.k();
    std::vector<std::size_t> sizes(k, 0);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(st_.counts.rows(), static_cast<Index>(k));
    for (std::size_t j = 0; j < st_.z.size(); ++j) {
      if (st_.z[j] >= k) throw Error(ErrorKind::InvalidArgument, "label out of range");
      ++sizes[st_.z[j]];
      for (const auto& [row, c] : cols_[j]) counts(static_cast<Index>(row), static_cast<Index>(st_.z[j])) += c;
    }
    if (sizes != st_.sizes) throw Error(ErrorKind::InvalidArgument, "cluster sizes drifted");
    if (counts != st_.counts) throw Error(ErrorKind::InvalidArgument, "feature counts drifted");
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) throw Error(ErrorKind::InvalidArgument, "empty occupied cluster");
      const double total = st_.log_phi.col(static_cast<Index>(c)).array().exp().sum();
      if (std::abs(total - 1) > 1e-12) throw Error(ErrorKind::InvalidArgument, "phi column off simplex");
    }
  }

  void record(std::size_t it) {
    TraceSample s;
    s.iteration = it;
    s.z = st_.z;
    s.phi = st_.phi();
    s.k = st_.k();
    s.alpha = st_.alpha;
    s.beta = st_.beta;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      s.log_likelihood +=
          multinomial_log_likelihood(cols_[j], st_.log_phi.col(static_cast<Index>(st_.z[j])));
    }
    trace_.samples.push_back(std::move(s));
  }

  const features::FeatureMatrix& y_;
  GibbsTrace trace_;
  const ModelHyperparams& hp_;
  std::vector<features::SparseColumn> cols_;
  GibbsState st_;
  Rng rng_;
};

}  // namespace

GibbsTrace gibbs_run(const features::FeatureMatrix& y, const ModelHyperparams& hp,
                     const ProgressFn& progress) {
  hp.validate();
  if (y.num_solutions() < 2) {
    throw Error(ErrorKind::InvalidArgument, "the sampler needs at least two solutions");
  }
  GibbsTrace trace;
  trace.hyperparams = hp;
  trace.num_solutions = y.num_solutions();
  trace.num_features = y.num_features();
  Sampler sampler(y, std::move(trace));
  sampler.start();
  return sampler.run(0, hp.iterations, progress);
}

GibbsTrace gibbs_resume(const features::FeatureMatrix& y, GibbsTrace trace,
                        std::optional<std::size_t> iterations, const ProgressFn& progress) {
  if (iterations) trace.hyperparams.iterations = *iterations;
  trace.hyperparams.validate();
  if (trace.num_solutions != y.num_solutions() || trace.num_features != y.num_features()) {
    throw Error(ErrorKind::InvalidArgument, "trace was recorded on a different feature matrix");
  }
  const std::size_t from = trace.checkpoint.completed;
  const std::size_t to = trace.hyperparams.iterations;
  if (from > to) throw Error(ErrorKind::InvalidArgument, "trace already has more sweeps than requested");
  Sampler sampler(y, std::move(trace));
  sampler.restore();
  return sampler.run(from, to, progress);
}

}  // namespace mlp::bayes
