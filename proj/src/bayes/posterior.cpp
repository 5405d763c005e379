#include "mlp/bayes/posterior.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace mlp::bayes {

using Index = Eigen::Index;

double PosteriorSummary::k_hat_probability() const {
  std::size_t total = 0;
  for (const auto& [k, c] : k_counts) total += c;
  return total == 0 ? 0.0 : static_cast<double>(retained) / static_cast<double>(total);
}

// Shortest augmenting paths with row/column potentials.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw Error(ErrorKind::InvalidArgument, "cost matrix is not square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Index>(i0 - 1), static_cast<Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> out(n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) out[p[j] - 1] = j - 1;
  }
  return out;
}

PosteriorSummary summarize_posterior(const std::vector<TraceSample>& samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyTrace, "no retained samples to summarize");

  PosteriorSummary out;
  for (const auto& s : samples) ++out.k_counts[s.k];
  std::size_t best = 0;
  for (const auto& [k, c] : out.k_counts) {
    if (c > best) {  // map order makes ties go to the smaller K
      best = c;
      out.k_hat = k;
    }
  }
  out.retained = best;

  std::vector<std::size_t> keep;
  for (std::size_t l = 0; l < samples.size(); ++l) {
    if (samples[l].k == out.k_hat) keep.push_back(l);
  }
  out.l_max = keep.front();
  for (std::size_t l : keep) {
    if (samples[l].log_likelihood > samples[out.l_max].log_likelihood) out.l_max = l;
  }
  out.l_max_iteration = samples[out.l_max].iteration;

  const auto k = static_cast<Index>(out.k_hat);
  const Eigen::MatrixXd& ref = samples[out.l_max].phi;
  const auto v = ref.rows();
  const std::size_t n = samples[out.l_max].z.size();

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(v, k);
  std::vector<std::vector<std::size_t>> votes(n, std::vector<std::size_t>(out.k_hat, 0));
  for (std::size_t l : keep) {
    const auto& s = samples[l];
    Eigen::MatrixXd cost(k, k);
    for (Index a = 0; a < k; ++a) {
      for (Index b = 0; b < k; ++b) cost(a, b) = (s.phi.col(a) - ref.col(b)).cwiseAbs().sum();
    }
    const auto perm = hungarian(cost);  // sample label a -> reference label perm[a]
    for (Index a = 0; a < k; ++a) sum.col(static_cast<Index>(perm[a])) += s.phi.col(a);
    for (std::size_t j = 0; j < n; ++j) ++votes[j][perm[s.z[j]]];
  }
  const Eigen::MatrixXd mean = sum / static_cast<double>(keep.size());

  // canonical cluster order, independent of the chain's numbering
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index i = 0; i < v; ++i) {
      if (mean(i, a) != mean(i, b)) return mean(i, a) > mean(i, b);
    }
    return a < b;
  });
  std::vector<std::size_t> rank(static_cast<std::size_t>(k));
  out.phi_hat.resize(v, k);
  for (Index c = 0; c < k; ++c) {
    out.phi_hat.col(c) = mean.col(order[c]);
    rank[static_cast<std::size_t>(order[c])] = static_cast<std::size_t>(c);
  }

  out.z_hat.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> ordered(out.k_hat);
    for (std::size_t c = 0; c < out.k_hat; ++c) ordered[rank[c]] = votes[j][c];
    out.z_hat[j] = static_cast<std::size_t>(
        std::max_element(ordered.begin(), ordered.end()) - ordered.begin());
  }
  return out;
}

}  // namespace mlp::bayes
