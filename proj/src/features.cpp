#include "mlp/features.hpp"

#include "mlp/error.hpp"
#include "mlp/expr/parser.hpp"
#include "mlp/expr/tokenize.hpp"

#include <algorithm>

namespace mlp::features {
namespace {

bool is_blank_text(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> solution_keys(const SolutionInput& in, expr::SimplificationLevel level,
                                       std::size_t& opaque) {
  std::vector<std::string> keys;
  auto add_expression = [&](std::string_view text) {
    bool was_opaque = false;
    keys.push_back(expression_key(text, level, &was_opaque));
    if (was_opaque) ++opaque;
  };
  switch (in.source) {
    case SolutionInput::Source::Body: {
      std::vector<std::string> segments;
      try {
        segments = expr::tokenize_solution({in.learner_id, in.body});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BlankSolution) throw;
        // prose only: the whole answer is one opaque feature
        keys.push_back(opaque_key(trim(in.body)));
        ++opaque;
        return keys;
      }
      for (const auto& seg : segments) add_expression(seg);
      break;
    }
    case SolutionInput::Source::Expressions:
      for (const auto& item : in.items) {
        if (!is_blank_text(item)) add_expression(item);
      }
      break;
    case SolutionInput::Source::Keys:
      for (const auto& item : in.items) {
        if (!item.empty()) keys.push_back(item);
      }
      break;
  }
  return keys;
}

}  // namespace

SolutionInput SolutionInput::from_body(std::string id, std::string body) {
  return SolutionInput{std::move(id), Source::Body, std::move(body), {}};
}

SolutionInput SolutionInput::from_expressions(std::string id, std::vector<std::string> exprs) {
  return SolutionInput{std::move(id), Source::Expressions, {}, std::move(exprs)};
}

SolutionInput SolutionInput::from_keys(std::string id, std::vector<std::string> keys) {
  return SolutionInput{std::move(id), Source::Keys, {}, std::move(keys)};
}

bool SolutionInput::blank() const {
  if (source == Source::Body) return is_blank_text(body);
  return std::all_of(items.begin(), items.end(),
                     [](const std::string& s) { return is_blank_text(s); });
}

SparseColumn FeatureMatrix::column(std::size_t j) const {
  SparseColumn out;
  const auto col = y.col(static_cast<Eigen::Index>(j));
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (col[i] != 0) out.emplace_back(static_cast<std::size_t>(i), col[i]);
  }
  return out;
}

std::string opaque_key(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string expression_key(std::string_view text, expr::SimplificationLevel level,
                           bool* opaque) {
  if (opaque) *opaque = false;
  try {
    return expr::canonicalize(expr::parse(text), level).key;
  } catch (const ParseError&) {
    if (opaque) *opaque = true;
    return opaque_key(trim(text));
  }
}

FeatureBuild build_matrix(std::span<const SolutionInput> solutions,
                          expr::SimplificationLevel level, Encoding encoding) {
  if (solutions.empty()) throw Error(ErrorKind::EmptyCorpus, "no solutions to featurize");

  FeatureBuild out;
  out.matrix.encoding = encoding;
  std::unordered_map<std::string, std::size_t> index;

  for (const auto& in : solutions) {
    if (in.blank()) {
      out.filtered.push_back(in.learner_id);
      continue;
    }
    SolutionFeatures sf;
    sf.learner_id = in.learner_id;
    sf.keys = solution_keys(in, level, out.opaque_segments);
    if (sf.keys.empty()) {
      out.filtered.push_back(in.learner_id);
      continue;
    }
    for (const auto& key : sf.keys) {
      auto [it, inserted] = index.try_emplace(key, out.matrix.vocabulary.size());
      if (inserted) out.matrix.vocabulary.push_back(key);
      sf.sequence.push_back(it->second);
    }
    sf.distinct = sf.sequence;
    std::sort(sf.distinct.begin(), sf.distinct.end());
    sf.distinct.erase(std::unique(sf.distinct.begin(), sf.distinct.end()), sf.distinct.end());
    out.solutions.push_back(std::move(sf));
  }
  if (out.solutions.empty()) throw Error(ErrorKind::AllBlank, "every solution is blank");

  const auto rows = static_cast<Eigen::Index>(out.matrix.vocabulary.size());
  const auto cols = static_cast<Eigen::Index>(out.solutions.size());
  out.matrix.y = Eigen::MatrixXi::Zero(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (std::size_t row : out.solutions[static_cast<std::size_t>(j)].sequence) {
      int& cell = out.matrix.y(static_cast<Eigen::Index>(row), j);
      cell = encoding == Encoding::Binary ? 1 : cell + 1;
    }
  }
  return out;
}

Eigen::VectorXi prefix_vector(const SolutionFeatures& s, std::size_t v,
                              std::size_t vocabulary_size, Encoding encoding) {
  if (v < 1 || v > s.length()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "prefix length " + std::to_string(v) + " outside [1, " +
                    std::to_string(s.length()) + "] for solution '" + s.learner_id + "'");
  }
  Eigen::VectorXi y = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(vocabulary_size));
  for (std::size_t k = 0; k < v; ++k) {
    const std::size_t row = s.sequence[k];
    if (row >= vocabulary_size) {
      throw Error(ErrorKind::IndexOutOfRange, "vocabulary row out of range");
    }
    int& cell = y[static_cast<Eigen::Index>(row)];
    cell = encoding == Encoding::Binary ? 1 : cell + 1;
  }
  return y;
}

}  // namespace mlp::features
