#pragma once

// The cluster -> representatives -> grade loop shared by the CLI, the service
// and the experiment runner.

#include "mlp/bayes/gibbs.hpp"
#include "mlp/bayes/grading.hpp"
#include "mlp/bayes/posterior.hpp"
#include "mlp/cluster/affinity_propagation.hpp"
#include "mlp/cluster/representatives.hpp"
#include "mlp/cluster/similarity.hpp"
#include "mlp/dataset.hpp"

#include <map>
#include <optional>
#include <string>

namespace mlp {

enum class Method { Spectral, Affinity, Bayes };

std::string to_string(Method m);          // "sc", "ap", "bayes"
Method parse_method(std::string_view s);  // throws Error(InvalidArgument)

struct AnalysisOptions {
  Method method = Method::Affinity;
  std::optional<std::size_t> k;  // required by spectral clustering
  std::uint64_t seed = 0;
  features::Encoding encoding = features::Encoding::Binary;
  cluster::AffinityOptions affinity;  // its seed is overridden by `seed`
  bayes::ModelHyperparams bayes;      // its seed is overridden by `seed`
  double feedback_tolerance = 0.5;
};

struct Analysis {
  Dataset dataset;  // blank solutions already dropped; aligned with features
  AnalysisOptions options;
  features::FeatureBuild features;
  cluster::SimilarityMatrix similarity;
  cluster::ClusterAssignment assignment;  // for Bayes: the posterior mode labels
  cluster::RepresentativeSet representatives;
  bool converged = true;                  // affinity propagation only
  std::optional<bayes::GibbsTrace> trace;
  std::optional<bayes::PosteriorSummary> posterior;

  const Question& question() const { return dataset.question; }
  std::size_t size() const { return features.solutions.size(); }
  const std::string& id(std::size_t j) const { return features.solutions[j].learner_id; }
  std::size_t index_of(const std::string& id) const;  // throws Error(IndexOutOfRange)
  std::vector<std::string> representative_ids() const;  // distinct, in cluster order
};

// Throws Error(InvalidArgument) for a missing or out-of-range K.
Analysis run_analysis(const Dataset& dataset, const AnalysisOptions& options,
                      const bayes::ProgressFn& progress = {});

// Continues a saved Gibbs trace of the same dataset (optionally to more
// iterations) and summarises it as run_analysis would. Throws
// Error(InvalidArgument) unless the options select the Bayesian method and the
// trace matches the dataset's shape.
Analysis resume_analysis(const Dataset& dataset, const AnalysisOptions& options, bayes::GibbsTrace trace,
                         std::optional<std::size_t> iterations = std::nullopt,
                         const bayes::ProgressFn& progress = {});

struct GradeEntry {
  std::string id;
  std::size_t cluster = 0;
  double grade = 0;
  double rounded = 0;
  bool representative = false;
};

struct GradeReport {
  Method method = Method::Affinity;
  double g_max = 3;
  std::vector<double> cluster_grades;
  std::vector<std::string> shared_representatives;
  std::vector<GradeEntry> entries;
};

// Instructor grades keyed by representative id. Representatives keep their
// instructor grade; every other solution is graded by its cluster (similarity
// methods) or by the likelihood-weighted average (Bayes).
// Errors: MissingGrades if a representative is ungraded, InvalidArgument for
// a grade outside [0, g_max] or on a solution that is not a representative,
// IndexOutOfRange for an unknown id.
GradeReport grade_report(const Analysis& analysis, const std::map<std::string, double>& grades);

// Per-expression expected grades for one solution of a Bayes analysis.
// Throws Error(InvalidArgument) for other methods.
bayes::FeedbackTrace solution_feedback(const Analysis& analysis,
                                       const std::map<std::string, double>& grades,
                                       const std::string& solution_id);

}  // namespace mlp
