#include "mlp/cli.hpp"

#include "mlp/error.hpp"
#include "mlp/eval/experiment.hpp"
#include "mlp/eval/synth.hpp"
#include "mlp/expr/tokenize.hpp"
#include "mlp/io/files.hpp"
#include "mlp/io/graph.hpp"
#include "mlp/io/reports.hpp"
#include "mlp/service/service.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

namespace mlp {

namespace {

using io::Json;

struct Args {
  std::string config;
  std::string text, dataset, analysis, grades, solution, out, trace, resume;
  std::string level = "arithmetic";
  std::string encoding = "binary";
  std::string method;
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  std::optional<std::size_t> iterations, burn_in, init_clusters;
  double alpha_shape = 1, alpha_rate = 1;
  std::optional<double> damping, preference;
  std::optional<std::size_t> ap_iterations;
  double tolerance = 0.5;

  // eval
  std::string methods = "rs,sc,ap,bayes";
  std::string k_range = "5..40";
  std::string seeds = "0";
  std::size_t trials = 10;
  std::string format = "text";
  std::string json_out, csv_out;
  bool time = false;

  double threshold = 0.5;
  std::string host = "127.0.0.1";
  int port = 8080;

  // synth
  eval::SyntheticSpec synth;
  std::string synth_grades, synth_weights;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

std::size_t to_size(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') {
    throw Error(ErrorKind::InvalidArgument, "bad " + what + " '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorKind::InvalidArgument, "bad " + what + " '" + s + "'");
  return v;
}

// "A..B" or a single value.
std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto v = to_size(s, "K range");
    return {v, v};
  }
  return {to_size(s.substr(0, dots), "K range"), to_size(s.substr(dots + 2), "K range")};
}

// "0,3,7" or "0..9".
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (s.find("..") != std::string::npos) {
    auto [a, b] = parse_range(s);
    for (std::size_t x = a; x <= b; ++x) out.push_back(x);
  } else {
    for (const auto& part : split(s, ',')) out.push_back(to_size(part, "seed"));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "no seeds given");
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part, what));
  return out;
}

void build_app(CLI::App& app, Args& a) {
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", a.config, "key = value file; command-line flags win");

  auto* parse = app.add_subcommand("parse", "Split text into expressions and print their canonical keys");
  auto* text_opt = parse->add_option("--text", a.text, "Solution text");
  parse->add_option("--dataset", a.dataset, "Dataset file (JSON or CSV)")->excludes(text_opt);
  parse->add_option("--level", a.level, "Simplification level: arithmetic or full");
  parse->add_option("--out", a.out, "Output file");

  auto* featurize = app.add_subcommand("featurize", "Build the vocabulary and feature matrix of a dataset");
  featurize->add_option("--dataset", a.dataset)->required();
  featurize->add_option("--encoding", a.encoding, "binary or counts");
  featurize->add_option("--out", a.out);

  auto* cluster = app.add_subcommand("cluster", "Cluster a dataset and choose representatives");
  cluster->add_option("--dataset", a.dataset)->required();
  cluster->add_option("--method", a.method, "sc, ap or bayes")->required();
  cluster->add_option("--k", a.k, "Number of clusters (sc)");
  cluster->add_option("--seed", a.seed);
  cluster->add_option("--encoding", a.encoding, "binary or counts");
  cluster->add_option("--iterations", a.iterations, "Gibbs sweeps (bayes)");
  cluster->add_option("--burn-in", a.burn_in, "Discarded sweeps (bayes)");
  cluster->add_option("--init-clusters", a.init_clusters, "Initial clusters (bayes)");
  cluster->add_option("--alpha-shape", a.alpha_shape, "Gamma prior shape on alpha (bayes)");
  cluster->add_option("--alpha-rate", a.alpha_rate, "Gamma prior rate on alpha (bayes)");
  cluster->add_option("--damping", a.damping, "Damping (ap)");
  cluster->add_option("--preference", a.preference, "Preference (ap); default median similarity");
  cluster->add_option("--ap-iterations", a.ap_iterations, "Iteration cap (ap)");
  cluster->add_option("--tolerance", a.tolerance, "Feedback alert tolerance");
  cluster->add_option("--trace", a.trace, "Write the Gibbs trace here (bayes)");
  cluster->add_option("--resume", a.resume, "Continue a saved Gibbs trace (bayes)");
  cluster->add_option("--out", a.out, "Analysis file");

  auto* reps = app.add_subcommand("reps", "List the representatives of an analysis");
  reps->add_option("--analysis", a.analysis)->required();
  reps->add_option("--out", a.out);

  auto* grade = app.add_subcommand("grade", "Propagate instructor grades of the representatives");
  grade->add_option("--analysis", a.analysis)->required();
  grade->add_option("--grades", a.grades, "{\"grades\": {id: g}}")->required();
  grade->add_option("--out", a.out);

  auto* feedback = app.add_subcommand("feedback", "Expected grade after each expression of a solution");
  feedback->add_option("--analysis", a.analysis)->required();
  feedback->add_option("--grades", a.grades)->required();
  feedback->add_option("--solution", a.solution)->required();
  feedback->add_option("--out", a.out);

  auto* ev = app.add_subcommand("eval", "MAE versus K for several methods");
  ev->add_option("--dataset", a.dataset, "Dataset with ground-truth grades")->required();
  ev->add_option("--methods", a.methods, "Comma list of rs, sc, ap, bayes");
  ev->add_option("--k-range", a.k_range, "A..B");
  ev->add_option("--seeds", a.seeds, "Comma list or A..B");
  ev->add_option("--trials", a.trials, "Random baseline trials");
  ev->add_option("--iterations", a.iterations);
  ev->add_option("--burn-in", a.burn_in);
  ev->add_option("--format", a.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
  ev->add_option("--out", a.out, "Report in --format");
  ev->add_option("--json", a.json_out, "Also write the JSON report here");
  ev->add_option("--csv", a.csv_out, "Also write the MAE-vs-K CSV here");
  ev->add_flag("--time", a.time, "Record wall-clock seconds (reports then differ between runs)");

  auto* graph = app.add_subcommand("export-graph", "Similarity graph of an analysis");
  graph->add_option("--analysis", a.analysis)->required();
  graph->add_option("--threshold", a.threshold, "Minimum edge similarity in (0, 1]");
  graph->add_option("--grades", a.grades, "Representative grades, to colour nodes");
  graph->add_option("--out", a.out);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", a.host);
  serve->add_option("--port", a.port);

  auto* synth = app.add_subcommand("synth", "Write a planted-cluster dataset");
  synth->add_option("--n", a.synth.n);
  synth->add_option("--v", a.synth.v);
  synth->add_option("--k", a.synth.k);
  synth->add_option("--support", a.synth.support);
  synth->add_option("--overlap", a.synth.overlap);
  synth->add_option("--noise", a.synth.noise);
  synth->add_option("--seed", a.synth.seed);
  synth->add_option("--g-max", a.synth.g_max);
  synth->add_option("--grades", a.synth_grades, "Comma list of cluster grades");
  synth->add_option("--weights", a.synth_weights, "Comma list of relative cluster sizes");
  synth->add_option("--question-id", a.synth.question_id);
  synth->add_option("--out", a.out);
}

struct ConfigEntry {
  std::string key;
  std::string value;
  bool global = false;  // before any [section]
};

// key = value lines, '#' comments, optional [subcommand] sections.
std::vector<ConfigEntry> read_config(const std::string& path, const std::string& subcommand) {
  std::vector<ConfigEntry> out;
  std::istringstream in(io::read_file(path));
  std::string line, section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError(path + ":" + std::to_string(number), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw SchemaError(path + ":" + std::to_string(number), "empty key");
    if (section.empty() || section == subcommand) out.push_back({key, value, section.empty()});
  }
  return out;
}

// Command line plus config entries for options the command line left unset.
std::vector<std::string> with_config(const std::vector<std::string>& args, CLI::App& app, const Args& parsed) {
  if (parsed.config.empty()) return args;
  CLI::App* sub = app.get_subcommands().front();
  std::vector<std::string> extra;
  for (const auto& [key, value, global] : read_config(parsed.config, sub->get_name())) {
    const std::string flag = key.rfind("--", 0) == 0 ? key : "--" + key;
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      // Unsectioned keys are shared defaults; other subcommands may use them.
      if (global) continue;
      throw SchemaError(parsed.config + ": " + key, "not an option of '" + sub->get_name() + "'");
    }
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  std::vector<std::string> out = args;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

void parse_args(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

void emit(const Args& a, std::ostream& out, const std::string& content) {
  if (a.out.empty()) {
    out << content;
  } else {
    io::write_file_atomic(a.out, content);
  }
}

Analysis load_analysis(const std::string& path) { return io::analysis_from_json(io::parse_json(io::read_file(path))); }

Json parse_segments(const std::string& text, expr::SimplificationLevel level) {
  Json list = Json::array();
  std::vector<std::string> segments;
  try {
    segments = expr::tokenize_solution({"text", text});
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BlankSolution) throw;
    if (features::SolutionInput::from_body("text", text).blank()) throw;
    // prose only
    const auto t = trim(text);
    list.push_back({{"text", t}, {"key", features::opaque_key(t)}, {"opaque", true}});
    return list;
  }
  for (const auto& seg : segments) {
    bool opaque = false;
    const std::string key = features::expression_key(seg, level, &opaque);
    list.push_back({{"text", seg}, {"key", key}, {"opaque", opaque}});
  }
  return list;
}

int cmd_parse(const Args& a, std::ostream& out) {
  const auto level = expr::parse_simplification_level(a.level);
  Json j;
  j["level"] = expr::to_string(level);
  if (!a.dataset.empty()) {
    const Dataset d = io::load_dataset(a.dataset);
    Json sols = Json::array();
    for (const auto& s : d.solutions) {
      Json list = Json::array();
      using Source = features::SolutionInput::Source;
      if (s.source == Source::Body) {
        list = parse_segments(s.body, d.question.simplification);
      } else {
        for (const auto& item : s.items) {
          bool opaque = false;
          const std::string key =
              s.source == Source::Keys ? item : features::expression_key(item, d.question.simplification, &opaque);
          list.push_back({{"text", item}, {"key", key}, {"opaque", opaque}});
        }
      }
      sols.push_back({{"id", s.learner_id}, {"expressions", std::move(list)}});
    }
    j["level"] = expr::to_string(d.question.simplification);
    j["solutions"] = std::move(sols);
  } else {
    j["expressions"] = parse_segments(a.text, level);
  }
  emit(a, out, io::dump(j));
  return kExitOk;
}

features::Encoding encoding_of(const std::string& s) {
  if (s == "binary") return features::Encoding::Binary;
  if (s == "counts") return features::Encoding::Counts;
  throw Error(ErrorKind::InvalidArgument, "encoding must be binary or counts");
}

int cmd_featurize(const Args& a, std::ostream& out) {
  const Dataset d = io::load_dataset(a.dataset);
  auto f = features::build_matrix(d.solutions, d.question.simplification, encoding_of(a.encoding));
  f.filtered.insert(f.filtered.begin(), d.filtered.begin(), d.filtered.end());
  emit(a, out, io::dump(io::features_to_json(f)));
  return kExitOk;
}

AnalysisOptions analysis_options(const Args& a) {
  AnalysisOptions o;
  o.method = parse_method(a.method);
  o.k = a.k;
  o.seed = a.seed;
  o.encoding = encoding_of(a.encoding);
  if (a.damping) o.affinity.damping = *a.damping;
  o.affinity.preference = a.preference;
  if (a.ap_iterations) o.affinity.max_iterations = *a.ap_iterations;
  if (a.iterations) o.bayes.iterations = *a.iterations;
  if (a.burn_in) o.bayes.burn_in = *a.burn_in;
  o.bayes.init_clusters = a.init_clusters;
  o.bayes.alpha_shape = a.alpha_shape;
  o.bayes.alpha_rate = a.alpha_rate;
  o.feedback_tolerance = a.tolerance;
  return o;
}

int cmd_cluster(const Args& a, std::ostream& out, std::ostream& err) {
  const Dataset d = io::load_dataset(a.dataset);
  if (!d.filtered.empty()) err << "filtered " << d.filtered.size() << " blank solution(s)\n";
  const AnalysisOptions o = analysis_options(a);
  Analysis result;
  if (!a.resume.empty()) {
    auto trace = io::trace_from_json(io::parse_json(io::read_file(a.resume)));
    result = resume_analysis(d, o, std::move(trace), a.iterations);
  } else {
    result = run_analysis(d, o);
  }
  if (!a.trace.empty()) {
    if (!result.trace) throw Error(ErrorKind::InvalidArgument, "--trace needs --method bayes");
    io::write_file_atomic(a.trace, io::dump(io::trace_to_json(*result.trace)));
  }
  emit(a, out, io::dump(io::analysis_to_json(result)));
  return kExitOk;
}

int cmd_reps(const Args& a, std::ostream& out) {
  emit(a, out, io::dump(io::representatives_to_json(load_analysis(a.analysis))));
  return kExitOk;
}

int cmd_grade(const Args& a, std::ostream& out) {
  const Analysis an = load_analysis(a.analysis);
  emit(a, out, io::dump(io::grade_report_to_json(grade_report(an, io::load_grades(a.grades)))));
  return kExitOk;
}

int cmd_feedback(const Args& a, std::ostream& out) {
  const Analysis an = load_analysis(a.analysis);
  const auto trace = solution_feedback(an, io::load_grades(a.grades), a.solution);
  emit(a, out, io::dump(io::feedback_to_json(an, a.solution, trace)));
  return kExitOk;
}

int cmd_eval(const Args& a, std::ostream& out) {
  Dataset d = io::load_dataset(a.dataset);
  eval::ExperimentOptions o;
  o.methods.clear();
  for (const auto& m : split(a.methods, ',')) o.methods.push_back(eval::parse_experiment_method(m));
  std::tie(o.k_min, o.k_max) = parse_range(a.k_range);
  o.seeds = parse_seeds(a.seeds);
  o.baseline_trials = a.trials;
  if (a.iterations) o.bayes.iterations = *a.iterations;
  if (a.burn_in) o.bayes.burn_in = *a.burn_in;
  o.record_time = a.time;
  const auto report = eval::run_experiment(d, o);
  if (!a.json_out.empty()) io::write_file_atomic(a.json_out, eval::report_json(report));
  if (!a.csv_out.empty()) io::write_file_atomic(a.csv_out, eval::report_csv(report));
  const std::string body = a.format == "json"  ? eval::report_json(report)
                           : a.format == "csv" ? eval::report_csv(report)
                                               : eval::report_text(report);
  emit(a, out, body);
  return kExitOk;
}

int cmd_export_graph(const Args& a, std::ostream& out) {
  const Analysis an = load_analysis(a.analysis);
  std::optional<GradeReport> report;
  if (!a.grades.empty()) report = grade_report(an, io::load_grades(a.grades));
  const auto g = io::export_graph(an, a.threshold, report ? &*report : nullptr);
  emit(a, out, io::dump(io::graph_to_json(g)));
  return kExitOk;
}

int cmd_serve(const Args& a, std::ostream& err) {
  service::Service svc;
  service::HttpServer http(svc);
  const int port = http.bind(a.host, a.port);
  err << "listening on http://" << a.host << ":" << port << "\n";
  err.flush();
  http.serve();
  return kExitOk;
}

int cmd_synth(Args a, std::ostream& out) {
  if (!a.synth_grades.empty()) a.synth.grades = parse_doubles(a.synth_grades, "grade");
  if (!a.synth_weights.empty()) a.synth.weights = parse_doubles(a.synth_weights, "weight");
  const auto corpus = eval::synth_generate(a.synth);
  emit(a, out, io::dump(io::dataset_to_json(corpus.dataset)));
  return kExitOk;
}

int dispatch(CLI::App& app, const Args& a, std::ostream& out, std::ostream& err) {
  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "parse") {
    if (a.text.empty() && a.dataset.empty()) throw Error(ErrorKind::InvalidArgument, "parse needs --text or --dataset");
    return cmd_parse(a, out);
  }
  if (name == "featurize") return cmd_featurize(a, out);
  if (name == "cluster") return cmd_cluster(a, out, err);
  if (name == "reps") return cmd_reps(a, out);
  if (name == "grade") return cmd_grade(a, out);
  if (name == "feedback") return cmd_feedback(a, out);
  if (name == "eval") return cmd_eval(a, out);
  if (name == "export-graph") return cmd_export_graph(a, out);
  if (name == "serve") return cmd_serve(a, err);
  if (name == "synth") return cmd_synth(a, out);
  return kExitSchema;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App probe{"Clustering-based grading of open-response math answers", "mlp"};
  Args first;
  build_app(probe, first);
  // The config file may supply required options, so the first pass checks none.
  for (auto* sub : probe.get_subcommands({})) {
    for (auto* opt : sub->get_options()) opt->required(false);
  }
  try {
    parse_args(probe, args);
    const auto full = with_config(args, probe, first);
    CLI::App app{"Clustering-based grading of open-response math answers", "mlp"};
    Args a;
    build_app(app, a);
    parse_args(app, full);
    return dispatch(app, a, out, err);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return probe.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == ErrorKind::Schema || e.kind() == ErrorKind::Io ? kExitSchema : kExitModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitModel;
  }
}

}  // namespace mlp
