#pragma once

#include "mlp/cluster/similarity.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace mlp::eval {

// Mean |estimated - actual| over the solutions outside `graded`.
// Throws Error(EmptyAutoGradedSet) when every solution is graded and
// Error(CountMismatch) when the vectors differ in length.
double mae(const std::vector<double>& estimated, const std::vector<double>& actual,
           const std::set<std::size_t>& graded);

// Hands out true grades and audits how many distinct solutions each run saw.
class GradeOracle {
 public:
  explicit GradeOracle(std::vector<double> truth) : truth_(std::move(truth)) {}

  // Starts a run allowed to see at most `budget` distinct grades.
  void begin_run(std::size_t budget);
  // Throws Error(InvalidArgument) once the run exceeds its budget.
  double reveal(std::size_t j);

  std::size_t revealed_this_run() const noexcept { return seen_.size(); }
  std::size_t max_revealed_per_run() const noexcept { return max_revealed_; }
  std::size_t runs() const noexcept { return runs_; }
  std::size_t size() const noexcept { return truth_.size(); }

 private:
  std::vector<double> truth_;
  std::set<std::size_t> seen_;
  std::size_t budget_ = 0;
  std::size_t max_revealed_ = 0;
  std::size_t runs_ = 0;
};

struct BaselineResult {
  std::vector<double> grades;   // best trial
  std::set<std::size_t> graded;  // best trial's sample
  double mae = 0;
  std::vector<double> trial_mae;
};

// Random sub-sampling: each trial grades K random solutions and gives every
// other solution the grade of its most similar graded one (lowest index on
// ties). The best trial is kept. Trials use one random stream, so the first t
// trials are the same whatever `trials` is. Requires 1 <= K < N.
BaselineResult random_baseline(const cluster::SimilarityMatrix& s, std::size_t k,
                               GradeOracle& oracle, const std::vector<double>& actual,
                               std::uint64_t seed, std::size_t trials = 10);

BaselineResult random_baseline(const cluster::SimilarityMatrix& s, std::size_t k,
                               const std::vector<double>& actual, std::uint64_t seed,
                               std::size_t trials = 10);

}  // namespace mlp::eval
