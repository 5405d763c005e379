#include "mlp/bayes/model.hpp"

#include "mlp/error.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mlp::bayes {
namespace {

using Index = Eigen::Index;

double digamma(double x) { return boost::math::digamma(x); }

// psi(n + b) - psi(b); exact telescoping sum for small integer n
double digamma_step(double n, double b) {
  if (n == 0) return 0;
  if (n < 32 && n == std::floor(n)) {
    double s = 0;
    for (int m = 0; m < static_cast<int>(n); ++m) s += 1.0 / (b + m);
    return s;
  }
  return digamma(n + b) - digamma(b);
}

double log_gamma_draw(double shape, Rng& rng) {
  if (shape >= 1) return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
  // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space
  const double g = std::gamma_distribution<double>(shape + 1, 1.0)(rng);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u <= 0) u = std::numeric_limits<double>::min();
  return std::log(g) + std::log(u) / shape;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double multinomial_log_likelihood(const Eigen::VectorXi& y, const Eigen::VectorXd& phi) {
  if (y.size() != phi.size()) throw Error(ErrorKind::InvalidArgument, "y and phi differ in length");
  if ((y.array() == 0).all()) throw Error(ErrorKind::InvalidArgument, "feature vector is all zero");
  double out = 0;
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0) out += y(i) * std::log(phi(i));
  }
  return out;
}

double multinomial_log_likelihood(const features::SparseColumn& y, const Eigen::VectorXd& log_phi) {
  if (y.empty()) throw Error(ErrorKind::InvalidArgument, "feature vector is all zero");
  double out = 0;
  for (const auto& [row, count] : y) out += count * log_phi(static_cast<Index>(row));
  return out;
}

CrpMasses crp_conditional(std::span<const std::size_t> sizes_without_j, std::size_t n_total,
                          double alpha) {
  if (!(alpha > 0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  if (n_total == 0) throw Error(ErrorKind::CountMismatch, "no customers");
  const std::size_t others = std::accumulate(sizes_without_j.begin(), sizes_without_j.end(),
                                             std::size_t{0});
  if (others != n_total - 1) {
    throw Error(ErrorKind::CountMismatch, "cluster sizes sum to " + std::to_string(others) +
                                              ", expected " + std::to_string(n_total - 1));
  }
  const double denom = static_cast<double>(n_total - 1) + alpha;
  CrpMasses out;
  out.occupied.reserve(sizes_without_j.size());
  for (std::size_t n : sizes_without_j) out.occupied.push_back(static_cast<double>(n) / denom);
  out.fresh = alpha / denom;
  return out;
}

double new_cluster_log_marginal(const features::SparseColumn& y, std::size_t vocabulary_size,
                                double beta) {
  if (!(beta > 0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  const double vb = static_cast<double>(vocabulary_size) * beta;
  double total = 0;
  double out = 0;
  const double lg_beta = std::lgamma(beta);
  for (const auto& [row, count] : y) {
    total += count;
    out += std::lgamma(count + beta) - lg_beta;
  }
  return out + std::lgamma(vb) - std::lgamma(total + vb);
}

double new_cluster_log_marginal(const Eigen::VectorXi& y, double beta) {
  features::SparseColumn col;
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0) col.emplace_back(static_cast<std::size_t>(i), y(i));
  }
  return new_cluster_log_marginal(col, static_cast<std::size_t>(y.size()), beta);
}

double sample_alpha(std::size_t k, std::size_t n, double alpha_old, double prior_shape,
                    double prior_rate, Rng& rng) {
  if (k < 1 || n < 1) throw Error(ErrorKind::InvalidArgument, "sample_alpha needs K, N >= 1");
  // eta ~ Beta(alpha + 1, N) from two Gamma draws
  const double ga = std::gamma_distribution<double>(alpha_old + 1, 1.0)(rng);
  const double gb = std::gamma_distribution<double>(static_cast<double>(n), 1.0)(rng);
  double eta = ga / (ga + gb);
  if (!(eta > 0)) eta = std::numeric_limits<double>::min();
  const double rate = prior_rate - std::log(eta);
  const double kk = static_cast<double>(k);
  const double odds = (prior_shape + kk - 1) / (static_cast<double>(n) * rate);
  const double pi = odds / (1 + odds);
  const bool first = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < pi;
  const double shape = first ? prior_shape + kk : prior_shape + kk - 1;
  double out = std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
  if (!(out > 0)) out = std::numeric_limits<double>::min();
  return out;
}

double dirichlet_multinomial_log_evidence(const Eigen::MatrixXd& counts, double beta) {
  const double v = static_cast<double>(counts.rows());
  const double lg_beta = std::lgamma(beta);
  const double lg_vb = std::lgamma(v * beta);
  double out = 0;
  for (Index k = 0; k < counts.cols(); ++k) {
    const double nk = counts.col(k).sum();
    if (nk == 0) continue;
    out += lg_vb - std::lgamma(nk + v * beta);
    for (Index i = 0; i < counts.rows(); ++i) {
      if (counts(i, k) != 0) out += std::lgamma(counts(i, k) + beta) - lg_beta;
    }
  }
  return out;
}

BetaUpdate update_beta(const Eigen::MatrixXd& counts, double beta_old, const BetaOptions& options) {
  BetaUpdate out;
  out.beta = beta_old;
  if (counts.size() == 0 || (counts.array() == 0).all() || !(beta_old > 0)) return out;

  const double v = static_cast<double>(counts.rows());
  const Eigen::RowVectorXd totals = counts.colwise().sum();
  double beta = std::clamp(beta_old, options.beta_min, options.beta_max);
  auto step = [&](double b) {
    double num = 0;
    double den = 0;
    for (Index k = 0; k < counts.cols(); ++k) {
      if (totals(k) == 0) continue;
      for (Index i = 0; i < counts.rows(); ++i) num += digamma_step(counts(i, k), b);
      den += digamma_step(totals(k), v * b);
    }
    den *= v;
    return den > 0 ? b * num / den : b;
  };
  // The plain map converges linearly and can crawl when beta is large, so
  // every third iterate is replaced by its Aitken extrapolation whenever that
  // raises the evidence.
  double prev = 0;
  bool have_prev = false;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const double next = step(beta);
    out.iterations = it + 1;
    if (next >= options.beta_max) {
      out.beta = options.beta_max;
      out.capped = true;
      return out;
    }
    if (next <= options.beta_min) {
      out.beta = options.beta_min;
      out.floored = true;
      return out;
    }
    const double change = std::abs(next - beta) / beta;
    if (change < options.tolerance) {
      beta = next;
      out.converged = true;
      break;
    }
    if (have_prev) {
      const double curvature = next - 2 * beta + prev;
      const double jump = next - (next - beta) * (next - beta) / curvature;
      if (curvature != 0 && std::isfinite(jump) && jump > options.beta_min && jump < options.beta_max &&
          dirichlet_multinomial_log_evidence(counts, jump) >= dirichlet_multinomial_log_evidence(counts, next)) {
        have_prev = false;
        beta = jump;
        continue;
      }
    }
    prev = beta;
    have_prev = true;
    beta = next;
  }
  out.beta = beta;
  // a still-climbing iterate whose evidence keeps rising all the way to the cap
  if (!out.converged && beta > beta_old &&
      dirichlet_multinomial_log_evidence(counts, options.beta_max) >=
          dirichlet_multinomial_log_evidence(counts, beta)) {
    out.beta = options.beta_max;
    out.capped = true;
  }
  return out;
}

Eigen::VectorXd sample_log_dirichlet(const Eigen::VectorXd& params, Rng& rng) {
  Eigen::VectorXd out(params.size());
  for (Index i = 0; i < params.size(); ++i) out(i) = log_gamma_draw(params(i), rng);
  out.array() -= log_sum_exp(out);
  return out;
}

}  // namespace mlp::bayes
