#include "mlp/cluster/assignment.hpp"

#include "mlp/error.hpp"

#include <map>
#include <unordered_map>

namespace mlp::cluster {

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < k) out[labels[i]].push_back(i);
  }
  return out;
}

ClusterAssignment ClusterAssignment::from_labels(const std::vector<std::size_t>& raw) {
  ClusterAssignment out;
  std::unordered_map<std::size_t, std::size_t> remap;
  out.labels.reserve(raw.size());
  for (std::size_t label : raw) {
    auto [it, inserted] = remap.try_emplace(label, remap.size());
    out.labels.push_back(it->second);
  }
  out.k = remap.size();
  return out;
}

void ClusterAssignment::validate() const {
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t label : labels) {
    if (label >= k) throw Error(ErrorKind::InvalidArgument, "cluster label out of range");
    ++counts[label];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorKind::InvalidArgument, "cluster " + std::to_string(c) + " is empty");
    }
  }
}

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::InvalidArgument, "labelings differ in length");
  }
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;

  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows;
  std::map<std::size_t, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  double index = 0;
  for (const auto& [key, count] : table) index += choose2(count);
  double sum_rows = 0;
  for (const auto& [key, count] : rows) sum_rows += choose2(count);
  double sum_cols = 0;
  for (const auto& [key, count] : cols) sum_cols += choose2(count);

  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both partitions trivial and identical in shape
  return (index - expected) / (max_index - expected);
}

}  // namespace mlp::cluster
