#include "mlp/cluster/spectral.hpp"

#include "mlp/error.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>

namespace mlp::cluster {
namespace {

using Index = Eigen::Index;

std::vector<std::size_t> embed_and_split(const Eigen::MatrixXd& s, std::size_t k,
                                         std::uint64_t seed, const SpectralOptions& options) {
  const Index n = s.rows();
  if (k == 1) return std::vector<std::size_t>(static_cast<std::size_t>(n), 0);
  if (static_cast<Index>(k) == n) {
    std::vector<std::size_t> out(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }

  const Eigen::VectorXd inv_sqrt = s.rowwise().sum().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd m = inv_sqrt.asDiagonal() * s * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "eigendecomposition of the similarity matrix failed");
  }
  // Eigenvalues ascend, so the top K sit in the rightmost columns. Directions
  // with eigenvalue <= 0 carry no cluster structure: each pair of duplicate
  // solutions adds one at exactly 0, and the solver's basis for that
  // eigenspace is arbitrary. They are left out once K reaches them.
  const auto& lambda = eig.eigenvalues();
  const double floor = 1e-9 * lambda(n - 1);
  Index positive = 0;
  for (Index i = 0; i < n; ++i) positive += lambda(i) > floor;
  const Index dims = std::min(static_cast<Index>(k), std::max<Index>(positive, 1));
  Eigen::MatrixXd u = eig.eigenvectors().rightCols(dims);
  for (Index i = 0; i < n; ++i) {
    const double norm = u.row(i).norm();
    if (norm > 0) u.row(i) /= norm;
  }
  return kmeans(u, k, seed, options.kmeans).assignment.labels;
}

}  // namespace

ClusterAssignment spectral_cluster(const SimilarityMatrix& s, std::size_t k, std::uint64_t seed,
                                   const SpectralOptions& options) {
  const std::size_t n = s.size();
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidArgument, "spectral clustering needs 1 <= K <= N");
  }

  std::vector<std::size_t> isolates;
  std::vector<std::size_t> connected;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = s.values.row(static_cast<Index>(i)).sum() - s(i, i);
    (off > 0 ? connected : isolates).push_back(i);
  }

  std::vector<std::size_t> labels(n, 0);
  if (isolates.empty() || isolates.size() >= k) {
    labels = embed_and_split(s.values, k, seed, options);
    return ClusterAssignment::from_labels(labels);
  }

  const std::size_t rest_k = k - isolates.size();
  for (std::size_t c = 0; c < isolates.size(); ++c) labels[isolates[c]] = rest_k + c;

  Eigen::MatrixXd sub(static_cast<Index>(connected.size()), static_cast<Index>(connected.size()));
  for (std::size_t a = 0; a < connected.size(); ++a) {
    for (std::size_t b = 0; b < connected.size(); ++b) {
      sub(static_cast<Index>(a), static_cast<Index>(b)) = s(connected[a], connected[b]);
    }
  }
  const auto sub_labels = embed_and_split(sub, rest_k, seed, options);
  for (std::size_t a = 0; a < connected.size(); ++a) labels[connected[a]] = sub_labels[a];
  return ClusterAssignment::from_labels(labels);
}

}  // namespace mlp::cluster
