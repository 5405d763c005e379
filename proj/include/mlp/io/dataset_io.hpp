#pragma once

// Dataset files. The JSON form is self-describing:
//
//   {"schema": "mlp-dataset/1",
//    "question": {"id": "q1", "statement": "...", "g_max": 3,
//                 "simplification": "arithmetic" | "full"},
//    "solutions": [{"id": "a", "body": "x^2 + x^2 = 2x^2", "grade": 3},
//                  {"id": "b", "expressions": ["x^2+x^2", "2x^2"]},
//                  {"id": "c", "keys": ["(feat 1)", "(feat 4)"]}]}
//
// Each solution has exactly one of body / expressions / keys; grade is
// optional. CSV files carry the columns id, one of body / expressions / keys
// (list cells split on '|'), and optionally grade.

#include "mlp/dataset.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace mlp::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kDatasetSchema = "mlp-dataset/1";

Json dataset_to_json(const Dataset& d);
// Throws SchemaError naming the offending field.
Dataset dataset_from_json(const Json& j);

// Parses text as JSON; syntax errors become SchemaError at path "$".
Json parse_json(const std::string& text);

struct CsvOptions {
  std::string question_id;  // default: file stem
  std::string statement;
  double g_max = 3;
  expr::SimplificationLevel simplification = expr::SimplificationLevel::ArithmeticOnly;
};

Dataset dataset_from_csv(const std::string& text, const CsvOptions& options);

// Reads JSON, or CSV for a .csv extension, validates, and drops blank
// solutions (their ids land in Dataset::filtered). Throws SchemaError or
// Error(Io).
Dataset load_dataset(const std::filesystem::path& path, const CsvOptions& csv = {});
void save_dataset(const std::filesystem::path& path, const Dataset& d);

// Instructor grades: {"grades": {"<solution id>": g, ...}}.
std::map<std::string, double> grades_from_json(const Json& j);
Json grades_to_json(const std::map<std::string, double>& grades);
std::map<std::string, double> load_grades(const std::filesystem::path& path);

// Compact rendering used for every file the tools write: two-space indent and
// a trailing newline.
std::string dump(const Json& j);

}  // namespace mlp::io
