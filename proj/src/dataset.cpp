#include "mlp/dataset.hpp"

#include "mlp/error.hpp"

#include <unordered_set>

namespace mlp {

bool Dataset::has_all_grades() const {
  if (grades.size() != solutions.size()) return false;
  for (const auto& g : grades) {
    if (!g) return false;
  }
  return true;
}

std::vector<double> Dataset::truth() const {
  if (!has_all_grades()) throw Error(ErrorKind::MissingGrades, "dataset lacks ground-truth grades");
  std::vector<double> out;
  out.reserve(grades.size());
  for (const auto& g : grades) out.push_back(*g);
  return out;
}

void Dataset::validate() const {
  if (!(question.g_max > 0)) throw SchemaError("question.g_max", "must be positive");
  if (!grades.empty() && grades.size() != solutions.size()) {
    throw SchemaError("solutions", "grade count does not match solution count");
  }
  std::unordered_set<std::string> ids;
  for (std::size_t j = 0; j < solutions.size(); ++j) {
    const std::string path = "solutions[" + std::to_string(j) + "]";
    if (!ids.insert(solutions[j].learner_id).second) {
      throw SchemaError(path + ".id", "duplicate solution id '" + solutions[j].learner_id + "'");
    }
    if (j < grades.size() && grades[j] && (*grades[j] < 0 || *grades[j] > question.g_max)) {
      throw SchemaError(path + ".grade", "grade outside [0, g_max]");
    }
  }
}

void Dataset::drop_blank() {
  std::vector<features::SolutionInput> kept;
  std::vector<std::optional<double>> kept_grades;
  for (std::size_t j = 0; j < solutions.size(); ++j) {
    if (solutions[j].blank()) {
      filtered.push_back(solutions[j].learner_id);
      continue;
    }
    kept.push_back(std::move(solutions[j]));
    if (j < grades.size()) kept_grades.push_back(grades[j]);
  }
  solutions = std::move(kept);
  if (!grades.empty()) grades = std::move(kept_grades);
}

}  // namespace mlp
