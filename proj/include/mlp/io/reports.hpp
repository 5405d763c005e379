#pragma once

// JSON forms of analyses, grade reports, feedback traces, features and Gibbs
// traces. The CLI and the service both render through these functions, so the
// two produce identical bytes for the same inputs.

#include "mlp/io/dataset_io.hpp"
#include "mlp/pipeline.hpp"

namespace mlp::io {

inline constexpr const char* kAnalysisSchema = "mlp-analysis/1";
inline constexpr const char* kTraceSchema = "mlp-trace/1";

Json options_to_json(const AnalysisOptions& o);
AnalysisOptions options_from_json(const Json& j, const std::string& path = "$.options");

// Everything needed to rebuild the Analysis without re-running the model: the
// dataset, the options and the clustering result. The Gibbs trace is not
// included (see trace_to_json).
Json analysis_to_json(const Analysis& a);
// Recomputes features and similarity from the embedded dataset and restores
// the stored result. Throws SchemaError.
Analysis analysis_from_json(const Json& j);

Json clusters_to_json(const Analysis& a);
Json representatives_to_json(const Analysis& a);
Json grade_report_to_json(const GradeReport& r);
Json feedback_to_json(const Analysis& a, const std::string& solution_id, const bayes::FeedbackTrace& t);
Json features_to_json(const features::FeatureBuild& f);

Json hyperparams_to_json(const bayes::ModelHyperparams& hp);
bayes::ModelHyperparams hyperparams_from_json(const Json& j, const std::string& path);

Json trace_to_json(const bayes::GibbsTrace& t);
bayes::GibbsTrace trace_from_json(const Json& j);

}  // namespace mlp::io
