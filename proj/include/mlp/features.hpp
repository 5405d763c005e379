#pragma once

// Bag-of-expressions features: every distinct canonical expression key is one
// vocabulary row, every solution one column of Y.

#include "mlp/expr/canonical.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mlp::features {

enum class Encoding { Binary, Counts };

// One learner's submission as it arrives from a dataset: raw text, a
// pre-split list of expression strings, or a list of opaque feature keys
// (already canonical, used verbatim).
struct SolutionInput {
  enum class Source { Body, Expressions, Keys };

  std::string learner_id;
  Source source = Source::Body;
  std::string body;
  std::vector<std::string> items;

  static SolutionInput from_body(std::string id, std::string body);
  static SolutionInput from_expressions(std::string id, std::vector<std::string> exprs);
  static SolutionInput from_keys(std::string id, std::vector<std::string> keys);

  bool blank() const;
};

struct SolutionFeatures {
  std::string learner_id;
  std::vector<std::string> keys;      // in order of appearance, duplicates kept
  std::vector<std::size_t> sequence;  // vocabulary row of each entry of `keys`
  std::vector<std::size_t> distinct;  // sorted distinct rows

  std::size_t length() const noexcept { return keys.size(); }
};

using SparseColumn = std::vector<std::pair<std::size_t, int>>;

struct FeatureMatrix {
  std::vector<std::string> vocabulary;
  Eigen::MatrixXi y;  // vocabulary.size() x number of solutions
  Encoding encoding = Encoding::Binary;

  std::size_t num_features() const noexcept { return vocabulary.size(); }
  std::size_t num_solutions() const noexcept { return static_cast<std::size_t>(y.cols()); }
  // Nonzero (row, value) pairs of column j in ascending row order.
  SparseColumn column(std::size_t j) const;
};

struct FeatureBuild {
  FeatureMatrix matrix;
  std::vector<SolutionFeatures> solutions;  // aligned with the columns of Y
  std::vector<std::string> filtered;        // ids of blank inputs that were skipped
  std::size_t opaque_segments = 0;          // segments that failed to parse
};

// Feature key of one expression string: the canonical key when it parses,
// otherwise the opaque key of its trimmed text.
std::string expression_key(std::string_view text, expr::SimplificationLevel level,
                           bool* opaque = nullptr);

// `"text"` with backslash escapes; never collides with a canonical key.
std::string opaque_key(std::string_view text);

// Vocabulary in first-appearance order. Blank inputs are skipped and listed in
// `filtered`. Throws Error(EmptyCorpus) for no inputs, Error(AllBlank) if every
// input is blank.
FeatureBuild build_matrix(std::span<const SolutionInput> solutions,
                          expr::SimplificationLevel level = expr::SimplificationLevel::ArithmeticOnly,
                          Encoding encoding = Encoding::Binary);

// y^(v): features of the first v expressions of `s`, 1 <= v <= s.length().
// Throws Error(IndexOutOfRange).
Eigen::VectorXi prefix_vector(const SolutionFeatures& s, std::size_t v,
                              std::size_t vocabulary_size, Encoding encoding = Encoding::Binary);

}  // namespace mlp::features
