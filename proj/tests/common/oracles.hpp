#pragma once

// Reference computations that share no code with the library: numeric
// integration and direct search.

#include <Eigen/Core>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace mlp::oracle {

// Dirichlet(beta)-multinomial probability of y (no coefficient) by integrating
// prod phi_i^{y_i} against the Dirichlet density, for V = 2 or 3.
inline double simplex_marginal(const std::vector<int>& y, double beta) {
  using boost::math::quadrature::tanh_sinh;
  tanh_sinh<double> q(15);
  const double tol = 1e-12;
  if (y.size() == 2) {
    const double norm = boost::math::beta(beta, beta);
    auto f = [&](double p) {
      return std::pow(p, y[0] + beta - 1) * std::pow(1 - p, y[1] + beta - 1);
    };
    return q.integrate(f, 0.0, 1.0, tol) / norm;
  }
  // phi = (s, (1 - s) t, (1 - s)(1 - t)), Jacobian (1 - s)
  const double norm = std::exp(3 * std::lgamma(beta) - std::lgamma(3 * beta));
  auto outer = [&](double s) {
    auto inner = [&](double t) {
      return std::pow(t, y[1] + beta - 1) * std::pow(1 - t, y[2] + beta - 1);
    };
    const double in = q.integrate(inner, 0.0, 1.0, tol);
    return std::pow(s, y[0] + beta - 1) * std::pow(1 - s, y[1] + y[2] + 2 * beta - 2 + 1) * in;
  };
  return q.integrate(outer, 0.0, 1.0, tol) / norm;
}

// Posterior mean of the CRP concentration given K clusters among N items
// under a Gamma(shape, rate) prior:
// p(a | K, N) ∝ a^(shape - 1 + K) e^(-rate a) Gamma(a) / Gamma(a + N).
inline double alpha_posterior_mean(std::size_t k, std::size_t n, double shape, double rate) {
  auto log_f = [&](double a) {
    return (shape - 1 + static_cast<double>(k)) * std::log(a) - rate * a + std::lgamma(a) -
           std::lgamma(a + static_cast<double>(n));
  };
  // scale by the value at a coarse grid maximum to keep exp() in range
  double peak = -std::numeric_limits<double>::infinity();
  for (double a = 1e-3; a < 1e3; a *= 1.05) peak = std::max(peak, log_f(a));
  boost::math::quadrature::exp_sinh<double> q;
  auto f0 = [&](double a) { return a <= 0 ? 0.0 : std::exp(log_f(a) - peak); };
  auto f1 = [&](double a) { return a <= 0 ? 0.0 : a * std::exp(log_f(a) - peak); };
  const double z = q.integrate(f0, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
  const double m = q.integrate(f1, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
  return m / z;
}

// Symmetric Dirichlet-multinomial log evidence summed over columns.
inline double log_evidence(const Eigen::MatrixXd& counts, double beta) {
  const double v = static_cast<double>(counts.rows());
  double out = 0;
  for (Eigen::Index k = 0; k < counts.cols(); ++k) {
    const double n = counts.col(k).sum();
    if (n == 0) continue;
    out += std::lgamma(v * beta) - std::lgamma(n + v * beta);
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
      out += std::lgamma(counts(i, k) + beta) - std::lgamma(beta);
    }
  }
  return out;
}

// argmax over beta of log_evidence: log-spaced grid, then Brent refinement
// between the grid neighbours of the best point.
inline double beta_argmax(const Eigen::MatrixXd& counts) {
  std::vector<double> grid;
  for (double lb = -12; lb <= 12; lb += 0.01) grid.push_back(lb);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double v = log_evidence(counts, std::exp(grid[g]));
    if (v > best_v) {
      best_v = v;
      best = g;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  auto neg = [&](double lb) { return -log_evidence(counts, std::exp(lb)); };
  const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 52);
  return std::exp(r.first);
}

// Batch-means standard error of a correlated chain's mean.
inline double batch_standard_error(const std::vector<double>& xs, std::size_t batches = 100) {
  const std::size_t per = xs.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += xs[i];
    means.push_back(s / static_cast<double>(per));
  }
  double mu = 0;
  for (double m : means) mu += m;
  mu /= static_cast<double>(batches);
  double var = 0;
  for (double m : means) var += (m - mu) * (m - mu);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace mlp::oracle
