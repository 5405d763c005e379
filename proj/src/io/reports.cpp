#include "mlp/io/reports.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlp::io {

namespace {

using Index = Eigen::Index;

// JSON has no infinities; they travel as strings.
Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double read_number(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw SchemaError(path, "expected a number");
}

const Json& need(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing");
  return *it;
}

std::size_t read_size(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw SchemaError(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::uint64_t read_u64(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
    throw SchemaError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string read_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::size_t> read_sizes(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_size(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Matrices are stored column by column.
Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json cols = Json::array();
  for (Index k = 0; k < m.cols(); ++k) {
    Json col = Json::array();
    for (Index i = 0; i < m.rows(); ++i) col.push_back(number(m(i, k)));
    cols.push_back(std::move(col));
  }
  return cols;
}

Eigen::MatrixXd matrix_from_json(const Json& j, std::size_t rows, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of columns");
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != rows) throw SchemaError(p, "expected " + std::to_string(rows) + " entries");
    for (std::size_t i = 0; i < rows; ++i) {
      m(static_cast<Index>(i), static_cast<Index>(k)) = read_number(j[k][i], p + "[" + std::to_string(i) + "]");
    }
  }
  return m;
}

const char* encoding_name(features::Encoding e) { return e == features::Encoding::Counts ? "counts" : "binary"; }

features::Encoding encoding_from(const std::string& s, const std::string& path) {
  if (s == "binary") return features::Encoding::Binary;
  if (s == "counts") return features::Encoding::Counts;
  throw SchemaError(path, "expected binary or counts");
}

template <class F>
auto rethrow_as_schema(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

Json hyperparams_to_json(const bayes::ModelHyperparams& hp) {
  Json j;
  j["alpha_shape"] = hp.alpha_shape;
  j["alpha_rate"] = hp.alpha_rate;
  j["alpha_init"] = hp.alpha_init;
  j["beta_init"] = hp.beta_init;
  j["iterations"] = hp.iterations;
  j["burn_in"] = hp.burn_in;
  j["seed"] = hp.seed;
  j["init_clusters"] = hp.init_clusters ? Json(*hp.init_clusters) : Json(nullptr);
  j["alpha_max"] = hp.alpha_max;
  j["beta_max_iterations"] = hp.beta.max_iterations;
  j["beta_tolerance"] = hp.beta.tolerance;
  j["beta_min"] = hp.beta.beta_min;
  j["beta_max"] = hp.beta.beta_max;
  return j;
}

bayes::ModelHyperparams hyperparams_from_json(const Json& j, const std::string& path) {
  bayes::ModelHyperparams hp;
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = read_number(j[key], path + "." + key);
  };
  auto size = [&](const char* key, std::size_t& out) {
    if (j.contains(key)) out = read_size(j[key], path + "." + key);
  };
  num("alpha_shape", hp.alpha_shape);
  num("alpha_rate", hp.alpha_rate);
  num("alpha_init", hp.alpha_init);
  num("beta_init", hp.beta_init);
  size("iterations", hp.iterations);
  size("burn_in", hp.burn_in);
  if (j.contains("seed")) hp.seed = read_u64(j["seed"], path + ".seed");
  if (j.contains("init_clusters") && !j["init_clusters"].is_null()) {
    hp.init_clusters = read_size(j["init_clusters"], path + ".init_clusters");
  }
  num("alpha_max", hp.alpha_max);
  size("beta_max_iterations", hp.beta.max_iterations);
  num("beta_tolerance", hp.beta.tolerance);
  num("beta_min", hp.beta.beta_min);
  num("beta_max", hp.beta.beta_max);
  rethrow_as_schema(path, [&] {
    hp.validate();
    return 0;
  });
  return hp;
}

Json options_to_json(const AnalysisOptions& o) {
  Json j;
  j["method"] = to_string(o.method);
  j["k"] = o.k ? Json(*o.k) : Json(nullptr);
  j["seed"] = o.seed;
  j["encoding"] = encoding_name(o.encoding);
  j["affinity"] = {{"preference", o.affinity.preference ? Json(*o.affinity.preference) : Json(nullptr)},
                   {"damping", o.affinity.damping},
                   {"max_iterations", o.affinity.max_iterations},
                   {"convergence_iterations", o.affinity.convergence_iterations}};
  j["bayes"] = hyperparams_to_json(o.bayes);
  j["feedback_tolerance"] = o.feedback_tolerance;
  return j;
}

AnalysisOptions options_from_json(const Json& j, const std::string& path) {
  AnalysisOptions o;
  o.method = rethrow_as_schema(path + ".method", [&] { return parse_method(read_string(need(j, "method", path), path + ".method")); });
  if (j.contains("k") && !j["k"].is_null()) o.k = read_size(j["k"], path + ".k");
  if (j.contains("seed")) o.seed = read_u64(j["seed"], path + ".seed");
  if (j.contains("encoding")) o.encoding = encoding_from(read_string(j["encoding"], path + ".encoding"), path + ".encoding");
  if (j.contains("affinity")) {
    const Json& a = j["affinity"];
    const std::string p = path + ".affinity";
    if (!a.is_object()) throw SchemaError(p, "expected an object");
    if (a.contains("preference") && !a["preference"].is_null()) o.affinity.preference = read_number(a["preference"], p + ".preference");
    if (a.contains("damping")) o.affinity.damping = read_number(a["damping"], p + ".damping");
    if (a.contains("max_iterations")) o.affinity.max_iterations = read_size(a["max_iterations"], p + ".max_iterations");
    if (a.contains("convergence_iterations")) {
      o.affinity.convergence_iterations = read_size(a["convergence_iterations"], p + ".convergence_iterations");
    }
  }
  if (j.contains("bayes")) o.bayes = hyperparams_from_json(j["bayes"], path + ".bayes");
  if (j.contains("feedback_tolerance")) o.feedback_tolerance = read_number(j["feedback_tolerance"], path + ".feedback_tolerance");
  return o;
}

Json clusters_to_json(const Analysis& a) {
  Json j;
  j["method"] = to_string(a.options.method);
  j["k"] = a.assignment.k;
  if (a.options.method == Method::Affinity) j["converged"] = a.converged;
  Json clusters = Json::array();
  const auto members = a.assignment.members();
  for (std::size_t k = 0; k < a.assignment.k; ++k) {
    Json c;
    c["cluster"] = k;
    c["representative"] = a.id(a.representatives.indices[k]);
    Json ids = Json::array();
    if (k < members.size()) {
      for (std::size_t m : members[k]) ids.push_back(a.id(m));
    }
    c["members"] = std::move(ids);
    clusters.push_back(std::move(c));
  }
  j["clusters"] = std::move(clusters);
  if (a.posterior) {
    const auto& p = *a.posterior;
    Json post;
    post["k_hat"] = p.k_hat;
    post["k_hat_probability"] = p.k_hat_probability();
    post["retained"] = p.retained;
    post["l_max_iteration"] = p.l_max_iteration;
    Json counts = Json::object();
    for (const auto& [k, c] : p.k_counts) counts[std::to_string(k)] = c;
    post["k_counts"] = std::move(counts);
    post["phi_hat"] = matrix_to_json(p.phi_hat);
    j["posterior"] = std::move(post);
  }
  if (a.trace) {
    const auto& d = a.trace->diagnostics;
    j["diagnostics"] = {{"alpha_capped", d.alpha_capped},
                        {"beta_capped", d.beta_capped},
                        {"beta_floored", d.beta_floored},
                        {"non_mixing", d.non_mixing}};
  }
  return j;
}

Json representatives_to_json(const Analysis& a) {
  Json j;
  j["method"] = to_string(a.options.method);
  const auto shared = a.representatives.shared();
  Json reps = Json::array();
  for (std::size_t k = 0; k < a.representatives.indices.size(); ++k) {
    const std::size_t r = a.representatives.indices[k];
    Json e;
    e["cluster"] = k;
    e["id"] = a.id(r);
    e["shared"] = std::find(shared.begin(), shared.end(), r) != shared.end();
    e["expressions"] = a.features.solutions[r].keys;
    reps.push_back(std::move(e));
  }
  j["representatives"] = std::move(reps);
  return j;
}

Json analysis_to_json(const Analysis& a) {
  Json j;
  j["schema"] = kAnalysisSchema;
  j["options"] = options_to_json(a.options);
  j["dataset"] = dataset_to_json(a.dataset);
  j["filtered"] = a.dataset.filtered;
  j["num_features"] = a.features.matrix.num_features();
  j["labels"] = a.assignment.labels;
  Json reps = Json::array();
  for (std::size_t r : a.representatives.indices) reps.push_back(a.id(r));
  j["representatives"] = std::move(reps);
  j["result"] = clusters_to_json(a);
  return j;
}

Analysis analysis_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  const std::string schema = read_string(need(j, "schema", "$"), "$.schema");
  if (schema != kAnalysisSchema) throw SchemaError("$.schema", "unsupported schema '" + schema + "'");

  Analysis a;
  a.options = options_from_json(need(j, "options", "$"));
  a.dataset = dataset_from_json(need(j, "dataset", "$"));
  a.dataset.drop_blank();
  if (j.contains("filtered")) {
    for (const auto& id : j["filtered"]) a.dataset.filtered.push_back(read_string(id, "$.filtered"));
  }
  const Dataset& d = a.dataset;
  a.features = rethrow_as_schema("$.dataset", [&] {
    return features::build_matrix(d.solutions, d.question.simplification, a.options.encoding);
  });
  a.similarity = rethrow_as_schema("$.dataset", [&] { return cluster::similarity(a.features.matrix); });
  const std::size_t n = a.size();

  a.assignment.labels = read_sizes(need(j, "labels", "$"), "$.labels");
  if (a.assignment.labels.size() != n) throw SchemaError("$.labels", "expected one label per solution");
  const Json& result = need(j, "result", "$");
  a.assignment.k = read_size(need(result, "k", "$.result"), "$.result.k");
  for (std::size_t l : a.assignment.labels) {
    if (l >= a.assignment.k) throw SchemaError("$.labels", "label out of range");
  }
  const Json& reps = need(j, "representatives", "$");
  if (!reps.is_array() || reps.size() != a.assignment.k) {
    throw SchemaError("$.representatives", "expected one representative per cluster");
  }
  a.representatives.method = a.options.method == Method::Bayes ? cluster::RepresentativeMethod::Bayesian
                                                               : cluster::RepresentativeMethod::Similarity;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const std::string p = "$.representatives[" + std::to_string(k) + "]";
    a.representatives.indices.push_back(rethrow_as_schema(p, [&] { return a.index_of(read_string(reps[k], p)); }));
  }
  if (result.contains("converged")) a.converged = result["converged"].get<bool>();

  if (a.options.method == Method::Bayes) {
    const Json& post = need(result, "posterior", "$.result");
    bayes::PosteriorSummary p;
    p.k_hat = read_size(need(post, "k_hat", "$.result.posterior"), "$.result.posterior.k_hat");
    p.phi_hat = matrix_from_json(need(post, "phi_hat", "$.result.posterior"), a.features.matrix.num_features(),
                                 "$.result.posterior.phi_hat");
    if (static_cast<std::size_t>(p.phi_hat.cols()) != p.k_hat || p.k_hat != a.assignment.k) {
      throw SchemaError("$.result.posterior.phi_hat", "expected k_hat columns");
    }
    p.z_hat = a.assignment.labels;
    if (post.contains("retained")) p.retained = read_size(post["retained"], "$.result.posterior.retained");
    if (post.contains("l_max_iteration")) {
      p.l_max_iteration = read_size(post["l_max_iteration"], "$.result.posterior.l_max_iteration");
    }
    if (post.contains("k_counts")) {
      for (const auto& [k, c] : post["k_counts"].items()) {
        p.k_counts[std::stoul(k)] = read_size(c, "$.result.posterior.k_counts." + k);
      }
    }
    a.posterior = std::move(p);
  }
  return a;
}

Json grade_report_to_json(const GradeReport& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["g_max"] = r.g_max;
  j["cluster_grades"] = r.cluster_grades;
  j["shared_representatives"] = r.shared_representatives;
  Json sols = Json::array();
  for (const auto& e : r.entries) {
    sols.push_back({{"id", e.id},
                    {"cluster", e.cluster},
                    {"grade", e.grade},
                    {"rounded", e.rounded},
                    {"representative", e.representative}});
  }
  j["solutions"] = std::move(sols);
  return j;
}

Json feedback_to_json(const Analysis& a, const std::string& solution_id, const bayes::FeedbackTrace& t) {
  const auto& sol = a.features.solutions[a.index_of(solution_id)];
  Json j;
  j["solution"] = solution_id;
  j["g_max"] = a.question().g_max;
  j["tolerance"] = a.options.feedback_tolerance;
  Json steps = Json::array();
  for (std::size_t v = 0; v < t.steps.size(); ++v) {
    steps.push_back({{"step", v + 1},
                     {"expression", sol.keys[v]},
                     {"expected_grade", t.steps[v].expected_grade},
                     {"p_incorrect", t.steps[v].p_incorrect},
                     {"alert", t.steps[v].alert}});
  }
  j["steps"] = std::move(steps);
  j["first_alert"] = t.first_alert ? Json(*t.first_alert) : Json(nullptr);
  return j;
}

Json features_to_json(const features::FeatureBuild& f) {
  Json j;
  j["encoding"] = encoding_name(f.matrix.encoding);
  j["vocabulary"] = f.matrix.vocabulary;
  j["filtered"] = f.filtered;
  j["opaque_segments"] = f.opaque_segments;
  Json sols = Json::array();
  for (std::size_t c = 0; c < f.solutions.size(); ++c) {
    Json col = Json::array();
    for (const auto& [row, value] : f.matrix.column(c)) col.push_back({row, value});
    sols.push_back({{"id", f.solutions[c].learner_id}, {"expressions", f.solutions[c].keys}, {"column", std::move(col)}});
  }
  j["solutions"] = std::move(sols);
  return j;
}

Json trace_to_json(const bayes::GibbsTrace& t) {
  Json j;
  j["schema"] = kTraceSchema;
  j["hyperparams"] = hyperparams_to_json(t.hyperparams);
  j["num_solutions"] = t.num_solutions;
  j["num_features"] = t.num_features;
  j["k_history"] = t.k_history;
  Json samples = Json::array();
  for (const auto& s : t.samples) {
    samples.push_back({{"iteration", s.iteration},
                       {"k", s.k},
                       {"alpha", number(s.alpha)},
                       {"beta", number(s.beta)},
                       {"log_likelihood", number(s.log_likelihood)},
                       {"z", s.z},
                       {"phi", matrix_to_json(s.phi)}});
  }
  j["samples"] = std::move(samples);
  j["diagnostics"] = {{"alpha_capped", t.diagnostics.alpha_capped},
                      {"beta_capped", t.diagnostics.beta_capped},
                      {"beta_floored", t.diagnostics.beta_floored},
                      {"non_mixing", t.diagnostics.non_mixing}};
  j["checkpoint"] = {{"completed", t.checkpoint.completed},
                     {"z", t.checkpoint.z},
                     {"log_phi", matrix_to_json(t.checkpoint.log_phi)},
                     {"alpha", number(t.checkpoint.alpha)},
                     {"beta", number(t.checkpoint.beta)},
                     {"rng_state", t.checkpoint.rng_state}};
  return j;
}

bayes::GibbsTrace trace_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  const std::string schema = read_string(need(j, "schema", "$"), "$.schema");
  if (schema != kTraceSchema) throw SchemaError("$.schema", "unsupported schema '" + schema + "'");
  bayes::GibbsTrace t;
  t.hyperparams = hyperparams_from_json(need(j, "hyperparams", "$"), "$.hyperparams");
  t.num_solutions = read_size(need(j, "num_solutions", "$"), "$.num_solutions");
  t.num_features = read_size(need(j, "num_features", "$"), "$.num_features");
  t.k_history = read_sizes(need(j, "k_history", "$"), "$.k_history");
  const Json& samples = need(j, "samples", "$");
  if (!samples.is_array()) throw SchemaError("$.samples", "expected an array");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string p = "$.samples[" + std::to_string(i) + "]";
    const Json& s = samples[i];
    bayes::TraceSample out;
    out.iteration = read_size(need(s, "iteration", p), p + ".iteration");
    out.k = read_size(need(s, "k", p), p + ".k");
    out.alpha = read_number(need(s, "alpha", p), p + ".alpha");
    out.beta = read_number(need(s, "beta", p), p + ".beta");
    out.log_likelihood = read_number(need(s, "log_likelihood", p), p + ".log_likelihood");
    out.z = read_sizes(need(s, "z", p), p + ".z");
    out.phi = matrix_from_json(need(s, "phi", p), t.num_features, p + ".phi");
    if (out.z.size() != t.num_solutions || static_cast<std::size_t>(out.phi.cols()) != out.k) {
      throw SchemaError(p, "sample shape disagrees with num_solutions or k");
    }
    t.samples.push_back(std::move(out));
  }
  const Json& d = need(j, "diagnostics", "$");
  t.diagnostics.alpha_capped = read_size(need(d, "alpha_capped", "$.diagnostics"), "$.diagnostics.alpha_capped");
  t.diagnostics.beta_capped = read_size(need(d, "beta_capped", "$.diagnostics"), "$.diagnostics.beta_capped");
  t.diagnostics.beta_floored = read_size(need(d, "beta_floored", "$.diagnostics"), "$.diagnostics.beta_floored");
  t.diagnostics.non_mixing = need(d, "non_mixing", "$.diagnostics").get<bool>();
  const Json& c = need(j, "checkpoint", "$");
  t.checkpoint.completed = read_size(need(c, "completed", "$.checkpoint"), "$.checkpoint.completed");
  t.checkpoint.z = read_sizes(need(c, "z", "$.checkpoint"), "$.checkpoint.z");
  t.checkpoint.log_phi = matrix_from_json(need(c, "log_phi", "$.checkpoint"), t.num_features, "$.checkpoint.log_phi");
  t.checkpoint.alpha = read_number(need(c, "alpha", "$.checkpoint"), "$.checkpoint.alpha");
  t.checkpoint.beta = read_number(need(c, "beta", "$.checkpoint"), "$.checkpoint.beta");
  t.checkpoint.rng_state = read_string(need(c, "rng_state", "$.checkpoint"), "$.checkpoint.rng_state");
  if (t.checkpoint.z.size() != t.num_solutions) throw SchemaError("$.checkpoint.z", "expected num_solutions labels");
  return t;
}

}  // namespace mlp::io
