#include "mlp/cluster/kmeans.hpp"

#include "mlp/error.hpp"

#include <limits>
#include <random>

namespace mlp::cluster {
namespace {

using Index = Eigen::Index;

Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const Index n = x.rows();
  Eigen::MatrixXd centers(static_cast<Index>(k), x.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  Index first = static_cast<Index>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  centers.row(0) = x.row(first);
  chosen[first] = true;

  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centers.row(0)).squaredNorm();

  for (std::size_t c = 1; c < k; ++c) {
    Index pick = -1;
    const double total = d2.sum();
    if (total > 0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (Index i = 0; i < n; ++i) {
        if (d2(i) <= 0) continue;
        pick = i;
        u -= d2(i);
        if (u < 0) break;
      }
    } else {
      // every remaining point coincides with a center
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    chosen[pick] = true;
    centers.row(static_cast<Index>(c)) = x.row(pick);
    for (Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (x.row(i) - centers.row(static_cast<Index>(c))).squaredNorm());
    }
  }
  return centers;
}

struct Run {
  std::vector<std::size_t> labels;
  Eigen::MatrixXd centers;
  double inertia;
};

Run lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers, std::size_t max_iterations) {
  const Index n = x.rows();
  const Index k = centers.rows();
  std::vector<std::size_t> labels(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd dist(n);

  auto assign = [&]() {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist(i) = best_d;
      if (labels[i] != static_cast<std::size_t>(best)) changed = true;
      labels[i] = static_cast<std::size_t>(best);
    }
    return changed;
  };

  // Empty clusters steal the point farthest from its center.
  auto repair = [&]() {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (auto l : labels) ++counts[l];
    for (Index c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[labels[i]] < 2) continue;
        if (far < 0 || dist(i) > dist(far)) far = i;
      }
      --counts[labels[far]];
      labels[far] = static_cast<std::size_t>(c);
      ++counts[c];
      dist(far) = 0;
      centers.row(c) = x.row(far);
    }
  };

  bool changed = assign();
  repair();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Index i = 0; i < n; ++i) {
      sums.row(static_cast<Index>(labels[i])) += x.row(i);
      counts(static_cast<Index>(labels[i])) += 1;
    }
    for (Index c = 0; c < k; ++c) centers.row(c) = sums.row(c) / counts(c);
    if (!changed && it > 0) break;
    changed = assign();
    repair();
  }
  return {labels, centers, dist.sum()};
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidArgument, "k-means needs 1 <= k <= number of points");
  }
  std::mt19937_64 rng(seed);
  Run best{{}, {}, std::numeric_limits<double>::infinity()};
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    Run run = lloyd(points, seed_centers(points, k, rng), options.max_iterations);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  KMeansResult out;
  out.assignment.labels = best.labels;
  out.assignment.k = k;
  out.centers = best.centers;
  out.inertia = best.inertia;
  return out;
}

}  // namespace mlp::cluster
