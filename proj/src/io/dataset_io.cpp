#include "mlp/io/dataset_io.hpp"

#include "mlp/error.hpp"
#include "mlp/io/files.hpp"

#include <cmath>

namespace mlp::io {

namespace {

using features::SolutionInput;

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing");
  return *it;
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
  return x;
}

std::vector<std::string> as_strings(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(path + "." + key, "unknown field");
  }
}

SolutionInput solution_from_json(const Json& s, const std::string& path) {
  if (!s.is_object()) throw SchemaError(path, "expected an object");
  only_keys(s, {"id", "body", "expressions", "keys", "grade"}, path);
  const std::string id = as_string(field(s, "id", path), path + ".id");
  if (id.empty()) throw SchemaError(path + ".id", "must not be empty");
  const int forms = int(s.contains("body")) + int(s.contains("expressions")) + int(s.contains("keys"));
  if (forms != 1) throw SchemaError(path, "needs exactly one of body, expressions, keys");
  if (s.contains("body")) return SolutionInput::from_body(id, as_string(s["body"], path + ".body"));
  if (s.contains("expressions")) {
    return SolutionInput::from_expressions(id, as_strings(s["expressions"], path + ".expressions"));
  }
  return SolutionInput::from_keys(id, as_strings(s["keys"], path + ".keys"));
}

// RFC 4180: quoted fields may hold commas, doubled quotes and line breaks.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw SchemaError("csv", "unterminated quoted field");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_bar(const std::string& cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = cell.find('|', start);
    std::string part = cell.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    const auto b = part.find_first_not_of(" \t");
    const auto e = part.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(part.substr(b, e - b + 1));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
}

Json dataset_to_json(const Dataset& d) {
  Json j;
  j["schema"] = kDatasetSchema;
  j["question"] = {{"id", d.question.id},
                   {"statement", d.question.statement},
                   {"g_max", d.question.g_max},
                   {"simplification", expr::to_string(d.question.simplification)}};
  Json sols = Json::array();
  for (std::size_t i = 0; i < d.solutions.size(); ++i) {
    const auto& s = d.solutions[i];
    Json o;
    o["id"] = s.learner_id;
    switch (s.source) {
      case SolutionInput::Source::Body: o["body"] = s.body; break;
      case SolutionInput::Source::Expressions: o["expressions"] = s.items; break;
      case SolutionInput::Source::Keys: o["keys"] = s.items; break;
    }
    if (i < d.grades.size() && d.grades[i]) o["grade"] = *d.grades[i];
    sols.push_back(std::move(o));
  }
  j["solutions"] = std::move(sols);
  return j;
}

Dataset dataset_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  only_keys(j, {"schema", "question", "solutions"}, "$");
  const std::string schema = as_string(field(j, "schema", "$"), "$.schema");
  if (schema != kDatasetSchema) throw SchemaError("$.schema", "unsupported schema '" + schema + "'");

  Dataset d;
  const Json& q = field(j, "question", "$");
  if (!q.is_object()) throw SchemaError("$.question", "expected an object");
  only_keys(q, {"id", "statement", "g_max", "simplification"}, "$.question");
  d.question.id = as_string(field(q, "id", "$.question"), "$.question.id");
  if (q.contains("statement")) d.question.statement = as_string(q["statement"], "$.question.statement");
  if (q.contains("g_max")) d.question.g_max = as_number(q["g_max"], "$.question.g_max");
  if (q.contains("simplification")) {
    try {
      d.question.simplification =
          expr::parse_simplification_level(as_string(q["simplification"], "$.question.simplification"));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError("$.question.simplification", e.what());
    }
  }

  const Json& sols = field(j, "solutions", "$");
  if (!sols.is_array()) throw SchemaError("$.solutions", "expected an array");
  bool any_grade = false;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const std::string path = "$.solutions[" + std::to_string(i) + "]";
    d.solutions.push_back(solution_from_json(sols[i], path));
    if (sols[i].contains("grade")) {
      d.grades.emplace_back(as_number(sols[i]["grade"], path + ".grade"));
      any_grade = true;
    } else {
      d.grades.emplace_back();
    }
  }
  if (!any_grade) d.grades.clear();
  d.validate();
  return d;
}

Dataset dataset_from_csv(const std::string& text, const CsvOptions& options) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw SchemaError("csv", "missing header row");
  const auto& header = rows.front();
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return static_cast<std::ptrdiff_t>(c);
    }
    return -1;
  };
  const auto id_col = column("id");
  const auto grade_col = column("grade");
  const std::ptrdiff_t form_cols[] = {column("body"), column("expressions"), column("keys")};
  if (id_col < 0) throw SchemaError("csv.header", "needs an id column");
  int forms = 0, form = -1;
  for (int f = 0; f < 3; ++f) {
    if (form_cols[f] >= 0) {
      ++forms;
      form = f;
    }
  }
  if (forms != 1) throw SchemaError("csv.header", "needs exactly one of body, expressions, keys");

  Dataset d;
  d.question.id = options.question_id;
  d.question.statement = options.statement;
  d.question.g_max = options.g_max;
  d.question.simplification = options.simplification;
  bool any_grade = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string path = "csv.row[" + std::to_string(r + 1) + "]";
    const auto& row = rows[r];
    auto cell = [&](std::ptrdiff_t c) { return static_cast<std::size_t>(c) < row.size() ? row[c] : std::string(); };
    const std::string id = cell(id_col);
    if (id.empty()) throw SchemaError(path + ".id", "must not be empty");
    const std::string content = cell(form_cols[form]);
    if (form == 0) d.solutions.push_back(SolutionInput::from_body(id, content));
    if (form == 1) d.solutions.push_back(SolutionInput::from_expressions(id, split_bar(content)));
    if (form == 2) d.solutions.push_back(SolutionInput::from_keys(id, split_bar(content)));
    const std::string g = grade_col >= 0 ? cell(grade_col) : std::string();
    if (g.empty()) {
      d.grades.emplace_back();
      continue;
    }
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(g, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != g.size() || !std::isfinite(value)) throw SchemaError(path + ".grade", "not a number");
    d.grades.emplace_back(value);
    any_grade = true;
  }
  if (!any_grade) d.grades.clear();
  d.validate();
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, const CsvOptions& csv) {
  const std::string text = read_file(path);
  Dataset d;
  if (path.extension() == ".csv") {
    CsvOptions opt = csv;
    if (opt.question_id.empty()) opt.question_id = path.stem().string();
    d = dataset_from_csv(text, opt);
  } else {
    d = dataset_from_json(parse_json(text));
  }
  d.drop_blank();
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
  write_file_atomic(path, dump(dataset_to_json(d)));
}

std::map<std::string, double> grades_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  only_keys(j, {"schema", "grades"}, "$");
  const Json& g = field(j, "grades", "$");
  if (!g.is_object()) throw SchemaError("$.grades", "expected an object of id -> grade");
  std::map<std::string, double> out;
  for (const auto& [id, value] : g.items()) out[id] = as_number(value, "$.grades." + id);
  return out;
}

Json grades_to_json(const std::map<std::string, double>& grades) {
  Json g = Json::object();
  for (const auto& [id, value] : grades) g[id] = value;
  return Json{{"grades", std::move(g)}};
}

std::map<std::string, double> load_grades(const std::filesystem::path& path) {
  return grades_from_json(parse_json(read_file(path)));
}

}  // namespace mlp::io
