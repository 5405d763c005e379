#pragma once

#include "mlp/expr/canonical.hpp"
#include "mlp/features.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlp {

struct Question {
  std::string id;
  std::string statement;
  double g_max = 3;
  expr::SimplificationLevel simplification = expr::SimplificationLevel::ArithmeticOnly;
};

// One question and its learners' solutions. grades[j], when present, is the
// ground-truth grade of solutions[j].
struct Dataset {
  Question question;
  std::vector<features::SolutionInput> solutions;
  std::vector<std::optional<double>> grades;
  std::vector<std::string> filtered;  // ids of blank solutions dropped on load

  bool has_all_grades() const;
  std::vector<double> truth() const;  // throws Error(MissingGrades) if any grade is absent
  // Throws Error(Schema) for duplicate ids, mismatched grade count or a grade
  // outside [0, g_max].
  void validate() const;
  // Removes blank solutions (and their grades) and records their ids.
  void drop_blank();
};

}  // namespace mlp
