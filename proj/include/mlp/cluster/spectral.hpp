#pragma once

#include "mlp/cluster/assignment.hpp"
#include "mlp/cluster/kmeans.hpp"
#include "mlp/cluster/similarity.hpp"

#include <cstdint>

namespace mlp::cluster {

struct SpectralOptions {
  KMeansOptions kmeans;
};

// Normalized spectral clustering: embed with the K eigenvectors of
// D^-1/2 S D^-1/2 having the largest eigenvalues (the bottom of the normalized
// Laplacian), normalize rows, then k-means++. Only eigenvectors with positive
// eigenvalues are used, so for large K the embedding has fewer than K columns. Solutions with no similarity to
// any other solution become singleton clusters before the embedding, as long
// as there are fewer of them than K.
// Throws Error(InvalidArgument) unless 1 <= k <= N.
ClusterAssignment spectral_cluster(const SimilarityMatrix& s, std::size_t k, std::uint64_t seed,
                                   const SpectralOptions& options = {});

}  // namespace mlp::cluster
