#include "mlp/cluster/affinity_propagation.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace mlp::cluster {
namespace {

using Index = Eigen::Index;

double median_off_diagonal(const Eigen::MatrixXd& s) {
  std::vector<double> v;
  const Index n = s.rows();
  v.reserve(static_cast<std::size_t>(n * (n - 1)));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) v.push_back(s(i, j));
    }
  }
  if (v.empty()) return s(0, 0);
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Index argmax_over(const Eigen::MatrixXd& s, Index row, const std::vector<Index>& cols) {
  Index best = 0;
  for (Index c = 1; c < static_cast<Index>(cols.size()); ++c) {
    if (s(row, cols[c]) > s(row, cols[best])) best = c;
  }
  return best;
}

// Nearest exemplar for every point; exemplars label themselves.
std::vector<Index> attach(const Eigen::MatrixXd& s, const std::vector<Index>& exemplars) {
  std::vector<Index> c(static_cast<std::size_t>(s.rows()));
  for (Index i = 0; i < s.rows(); ++i) c[i] = argmax_over(s, i, exemplars);
  for (Index k = 0; k < static_cast<Index>(exemplars.size()); ++k) c[exemplars[k]] = k;
  return c;
}

}  // namespace

AffinityResult affinity_propagation(const SimilarityMatrix& sim, const AffinityOptions& options) {
  const Index n = sim.values.rows();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "affinity propagation on an empty matrix");
  if (!(options.damping >= 0.5 && options.damping < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "damping must lie in [0.5, 1)");
  }

  AffinityResult out;
  if (n == 1) {
    out.assignment = ClusterAssignment::from_labels({0});
    out.exemplars = {0};
    out.converged = true;
    return out;
  }

  Eigen::MatrixXd s = sim.values;
  const double pref = options.preference.value_or(median_off_diagonal(s));
  s.diagonal().setConstant(pref);

  std::mt19937_64 rng(options.seed);
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::numeric_limits<double>::min();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      s(i, j) += (eps * s(i, j) + tiny * 100) * std::normal_distribution<double>()(rng);
    }
  }

  const double lambda = options.damping;
  const std::size_t window = std::max<std::size_t>(1, options.convergence_iterations);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd tmp(n, n);
  std::vector<std::vector<bool>> history(window, std::vector<bool>(n, false));
  std::vector<bool> is_exemplar(n, false);

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    // responsibilities
    tmp = a + s;
    for (Index i = 0; i < n; ++i) {
      Index top = 0;
      double first = -std::numeric_limits<double>::infinity();
      double second = first;
      for (Index k = 0; k < n; ++k) {
        const double v = tmp(i, k);
        if (v > first) {
          second = first;
          first = v;
          top = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (Index k = 0; k < n; ++k) {
        const double fresh = s(i, k) - (k == top ? second : first);
        r(i, k) = lambda * r(i, k) + (1 - lambda) * fresh;
      }
    }

    // availabilities
    tmp = r.cwiseMax(0.0);
    tmp.diagonal() = r.diagonal();
    const Eigen::RowVectorXd col_sums = tmp.colwise().sum();
    for (Index k = 0; k < n; ++k) {
      for (Index i = 0; i < n; ++i) {
        double v = col_sums(k) - tmp(i, k);
        if (i != k) v = std::min(v, 0.0);
        a(i, k) = lambda * a(i, k) + (1 - lambda) * v;
      }
    }

    std::size_t count = 0;
    for (Index i = 0; i < n; ++i) {
      is_exemplar[i] = a(i, i) + r(i, i) > 0;
      count += is_exemplar[i];
    }
    history[it % window] = is_exemplar;

    if (it + 1 >= window && count > 0) {
      bool stable = true;
      for (Index i = 0; i < n && stable; ++i) {
        for (std::size_t w = 1; w < window; ++w) {
          if (history[w][i] != history[0][i]) {
            stable = false;
            break;
          }
        }
      }
      if (stable) {
        out.converged = true;
        ++it;
        break;
      }
    }
  }
  out.iterations = it;

  std::vector<Index> exemplars;
  for (Index i = 0; i < n; ++i) {
    if (is_exemplar[i]) exemplars.push_back(i);
  }
  if (exemplars.empty()) {
    Index best = 0;
    for (Index i = 1; i < n; ++i) {
      if (a(i, i) + r(i, i) > a(best, best) + r(best, best)) best = i;
    }
    exemplars.push_back(best);
    out.converged = false;
  }

  // Each cluster re-elects the member most similar to the rest of it.
  auto c = attach(s, exemplars);
  for (Index k = 0; k < static_cast<Index>(exemplars.size()); ++k) {
    std::vector<Index> members;
    for (Index i = 0; i < n; ++i) {
      if (c[i] == k) members.push_back(i);
    }
    Index best = members.front();
    double best_sum = -std::numeric_limits<double>::infinity();
    for (Index m : members) {
      double sum = 0;
      for (Index i : members) sum += s(i, m);
      if (sum > best_sum) {
        best_sum = sum;
        best = m;
      }
    }
    exemplars[k] = best;
  }
  std::sort(exemplars.begin(), exemplars.end());
  exemplars.erase(std::unique(exemplars.begin(), exemplars.end()), exemplars.end());
  c = attach(s, exemplars);

  std::vector<std::size_t> raw(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) raw[i] = static_cast<std::size_t>(c[i]);
  out.assignment = ClusterAssignment::from_labels(raw);

  // exemplar order follows the compacted cluster numbering
  out.exemplars.assign(out.assignment.k, 0);
  for (Index k = 0; k < static_cast<Index>(exemplars.size()); ++k) {
    out.exemplars[out.assignment.labels[exemplars[k]]] = static_cast<std::size_t>(exemplars[k]);
  }
  return out;
}

}  // namespace mlp::cluster
