#pragma once

#include "mlp/eval/metrics.hpp"
#include "mlp/pipeline.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlp::eval {

enum class ExperimentMethod { Random, Spectral, Affinity, Bayes };

std::string to_string(ExperimentMethod m);               // "rs", "sc", "ap", "bayes"
ExperimentMethod parse_experiment_method(std::string_view s);  // throws Error(InvalidArgument)

struct ExperimentOptions {
  std::vector<ExperimentMethod> methods{ExperimentMethod::Random, ExperimentMethod::Spectral,
                                        ExperimentMethod::Affinity, ExperimentMethod::Bayes};
  std::size_t k_min = 5;
  std::size_t k_max = 40;  // clipped to N (N - 1 for the random baseline)
  std::vector<std::uint64_t> seeds{0};
  std::size_t baseline_trials = 10;
  cluster::AffinityOptions affinity;
  bayes::ModelHyperparams bayes;
  bool record_time = false;  // wall-clock makes reports differ between runs
};

struct ExperimentRow {
  ExperimentMethod method = ExperimentMethod::Random;
  std::uint64_t seed = 0;
  std::size_t clusters = 0;     // K requested (rs, sc) or found (ap, bayes)
  std::size_t graded = 0;       // distinct solutions whose true grade was revealed
  std::size_t auto_graded = 0;  // N - graded
  std::optional<double> mae;    // absent when nothing is left to auto-grade
  std::optional<double> seconds;
};

struct ExperimentReport {
  std::string question_id;
  std::size_t n = 0;
  std::size_t v = 0;
  std::vector<ExperimentRow> rows;
  std::size_t max_revealed_per_run = 0;  // from the auditing oracle
};

// Every method sees true grades only through a GradeOracle whose per-run
// budget is its number of representatives. MLP-B grades are rounded before
// scoring. Throws Error(MissingGrades) if the dataset lacks ground truth.
ExperimentReport run_experiment(const Dataset& dataset, const ExperimentOptions& options);

std::string report_text(const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);
// One row per (method, seed, K): the MAE-vs-K curves.
std::string report_csv(const ExperimentReport& report);

}  // namespace mlp::eval
