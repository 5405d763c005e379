#pragma once

#include <cstddef>
#include <vector>

namespace mlp::cluster {

// Hard partition of N solutions. Labels are 0-based and every cluster in
// [0, k) has at least one member.
struct ClusterAssignment {
  std::vector<std::size_t> labels;
  std::size_t k = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::vector<std::vector<std::size_t>> members() const;

  // Relabels so clusters are numbered by first appearance; k is recomputed.
  static ClusterAssignment from_labels(const std::vector<std::size_t>& raw);

  // Throws Error(InvalidArgument) if a label is out of range or a cluster is empty.
  void validate() const;
};

// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace mlp::cluster
