#pragma once

// Planted-cluster corpora: each cluster owns a window of features on a ring,
// neighbouring windows overlap, and every solution is its cluster's window
// with each feature independently flipped at the noise rate.

#include "mlp/dataset.hpp"

#include <cstdint>
#include <vector>

namespace mlp::eval {

struct SyntheticSpec {
  std::size_t n = 120;
  std::size_t v = 60;
  std::size_t k = 6;
  std::size_t support = 10;
  double overlap = 0.2;                       // fraction of a window shared with the next
  std::vector<double> grades{3, 2, 1, 0, 3, 2};  // per cluster, cycled if shorter than k
  double g_max = 3;
  double noise = 0.05;
  // Relative cluster sizes. Empty means k : k-1 : ... : 1, since real answer
  // clusters are far from equal in size; pass all ones for equal sizes.
  std::vector<double> weights;
  std::uint64_t seed = 0;
  std::string question_id = "synthetic";

  // Throws Error(InvalidSpec).
  void validate() const;
};

struct SyntheticCorpus {
  Dataset dataset;  // solutions as opaque keys "(feat i)", ground-truth grades set
  std::vector<std::size_t> labels;
  std::vector<double> grades;
};

SyntheticCorpus synth_generate(const SyntheticSpec& spec);

// Feature rows of cluster c's window.
std::vector<std::size_t> planted_support(const SyntheticSpec& spec, std::size_t c);

}  // namespace mlp::eval
