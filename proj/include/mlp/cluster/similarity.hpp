#pragma once

#include "mlp/expr/expr.hpp"
#include "mlp/features.hpp"

#include <Eigen/Core>

namespace mlp::cluster {

// S(i,j) = |common expressions| / min(|expressions of i|, |expressions of j|).
// Symmetric, unit diagonal, entries in [0, 1].
struct SimilarityMatrix {
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

// Computed on expression presence, so Counts-encoded matrices give the same S
// as their Binary counterpart. Throws Error(ZeroColumn) if a solution has no
// expression.
SimilarityMatrix similarity(const features::FeatureMatrix& y);

// The same ratio for one pair, as an exact fraction.
expr::Rational similarity_exact(const features::FeatureMatrix& y, std::size_t i, std::size_t j);

}  // namespace mlp::cluster
