#include "mlp/cluster/similarity.hpp"

#include "mlp/error.hpp"

#include <algorithm>

namespace mlp::cluster {
namespace {

Eigen::MatrixXd presence(const features::FeatureMatrix& y) {
  return (y.y.array() != 0).cast<double>().matrix();
}

}  // namespace

SimilarityMatrix similarity(const features::FeatureMatrix& y) {
  const Eigen::MatrixXd b = presence(y);
  const Eigen::MatrixXd gram = b.transpose() * b;
  const Eigen::Index n = gram.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (gram(j, j) == 0) {
      throw Error(ErrorKind::ZeroColumn,
                  "solution column " + std::to_string(j) + " has no expressions");
    }
  }
  SimilarityMatrix s;
  s.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = gram(i, j) / std::min(gram(i, i), gram(j, j));
      s.values(i, j) = v;
      s.values(j, i) = v;
    }
  }
  return s;
}

expr::Rational similarity_exact(const features::FeatureMatrix& y, std::size_t i, std::size_t j) {
  const auto n = y.num_solutions();
  if (i >= n || j >= n) throw Error(ErrorKind::IndexOutOfRange, "solution index out of range");
  long common = 0;
  long size_i = 0;
  long size_j = 0;
  for (Eigen::Index r = 0; r < y.y.rows(); ++r) {
    const bool a = y.y(r, static_cast<Eigen::Index>(i)) != 0;
    const bool b = y.y(r, static_cast<Eigen::Index>(j)) != 0;
    common += (a && b);
    size_i += a;
    size_j += b;
  }
  if (size_i == 0 || size_j == 0) throw Error(ErrorKind::ZeroColumn, "solution has no expressions");
  return expr::Rational(common, std::min(size_i, size_j));
}

}  // namespace mlp::cluster
