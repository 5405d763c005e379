#include "mlp/cluster/representatives.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mlp::cluster {

std::vector<std::size_t> RepresentativeSet::shared() const {
  std::vector<std::size_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1] && (out.empty() || out.back() != sorted[i])) {
      out.push_back(sorted[i]);
    }
  }
  return out;
}

std::string to_string(RepresentativeMethod m) {
  return m == RepresentativeMethod::Similarity ? "S" : "B";
}

RepresentativeSet select_representatives_s(const SimilarityMatrix& s,
                                           const ClusterAssignment& assignment,
                                           std::uint64_t seed) {
  if (assignment.size() != s.size()) {
    throw Error(ErrorKind::InvalidArgument, "assignment and similarity sizes differ");
  }
  assignment.validate();
  const Eigen::VectorXd row_sums = s.values.rowwise().sum();
  std::mt19937_64 rng(seed);
  RepresentativeSet out;
  out.method = RepresentativeMethod::Similarity;
  for (const auto& members : assignment.members()) {
    std::vector<double> sums;
    sums.reserve(members.size());
    for (std::size_t i : members) sums.push_back(row_sums(static_cast<Eigen::Index>(i)));
    const double best = *std::max_element(sums.begin(), sums.end());
    std::vector<std::size_t> tied;
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (best - sums[m] <= 1e-12 * std::max(1.0, std::abs(best))) tied.push_back(members[m]);
    }
    const std::size_t pick =
        tied.size() == 1 ? 0 : std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng);
    out.indices.push_back(tied[pick]);
  }
  return out;
}

std::vector<double> propagate_grades_s(const ClusterAssignment& assignment,
                                       const std::map<std::size_t, double>& cluster_grades) {
  std::vector<double> grades(assignment.size());
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    auto it = cluster_grades.find(assignment.labels[j]);
    if (it == cluster_grades.end()) {
      throw Error(ErrorKind::MissingClusterGrade,
                  "no grade for cluster " + std::to_string(assignment.labels[j]));
    }
    grades[j] = it->second;
  }
  return grades;
}

}  // namespace mlp::cluster
