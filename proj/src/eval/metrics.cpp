#include "mlp/eval/metrics.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace mlp::eval {

double mae(const std::vector<double>& estimated, const std::vector<double>& actual,
           const std::set<std::size_t>& graded) {
  if (estimated.size() != actual.size()) {
    throw Error(ErrorKind::CountMismatch, "estimated and actual grades differ in length");
  }
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < actual.size(); ++j) {
    if (graded.count(j)) continue;
    sum += std::abs(estimated[j] - actual[j]);
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::EmptyAutoGradedSet, "no auto-graded solutions");
  return sum / static_cast<double>(count);
}

void GradeOracle::begin_run(std::size_t budget) {
  seen_.clear();
  budget_ = budget;
  ++runs_;
}

double GradeOracle::reveal(std::size_t j) {
  if (j >= truth_.size()) throw Error(ErrorKind::IndexOutOfRange, "grade index out of range");
  seen_.insert(j);
  if (seen_.size() > budget_) {
    throw Error(ErrorKind::InvalidArgument,
                "run revealed more than " + std::to_string(budget_) + " grades");
  }
  max_revealed_ = std::max(max_revealed_, seen_.size());
  return truth_[j];
}

BaselineResult random_baseline(const cluster::SimilarityMatrix& s, std::size_t k,
                               GradeOracle& oracle, const std::vector<double>& actual,
                               std::uint64_t seed, std::size_t trials) {
  const std::size_t n = s.size();
  if (k < 1 || k >= n) throw Error(ErrorKind::InvalidArgument, "random baseline needs 1 <= K < N");
  if (actual.size() != n) throw Error(ErrorKind::CountMismatch, "grade count differs from N");
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be positive");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  BaselineResult best;
  best.mae = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k entries are a uniform sample.
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(order[i], order[pick(rng)]);
    }
    std::vector<std::size_t> sample(order.begin(), order.begin() + static_cast<long>(k));
    std::sort(sample.begin(), sample.end());

    oracle.begin_run(k);
    std::vector<double> grades(n, 0.0);
    for (std::size_t i : sample) grades[i] = oracle.reveal(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::binary_search(sample.begin(), sample.end(), j)) continue;
      std::size_t nearest = sample.front();
      for (std::size_t i : sample) {
        if (s(j, i) > s(j, nearest)) nearest = i;
      }
      grades[j] = grades[nearest];
    }
    std::set<std::size_t> graded(sample.begin(), sample.end());
    const double m = mae(grades, actual, graded);
    best.trial_mae.push_back(m);
    if (m < best.mae) {
      best.mae = m;
      best.grades = std::move(grades);
      best.graded = std::move(graded);
    }
  }
  return best;
}

BaselineResult random_baseline(const cluster::SimilarityMatrix& s, std::size_t k,
                               const std::vector<double>& actual, std::uint64_t seed,
                               std::size_t trials) {
  GradeOracle oracle(actual);
  return random_baseline(s, k, oracle, actual, seed, trials);
}

}  // namespace mlp::eval
