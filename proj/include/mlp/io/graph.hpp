#pragma once

// Node-link export of the similarity graph for cluster visualisation.

#include "mlp/io/dataset_io.hpp"
#include "mlp/pipeline.hpp"

#include <optional>

namespace mlp::io {

inline constexpr const char* kGraphSchema = "mlp-graph/1";

struct GraphNode {
  std::string id;
  std::size_t cluster = 0;
  std::optional<double> grade;
  bool representative = false;
};

struct GraphEdge {
  std::size_t source = 0;  // node indices, source < target
  std::size_t target = 0;
  double weight = 0;
};

struct GraphExport {
  double threshold = 0;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;  // sorted by (source, target)
};

// Edges join every pair with threshold <= S(i, j) and S(i, j) > 0.
// `grades` holds the known grade of each node, if any. Throws
// Error(InvalidArgument) unless 0 < threshold <= 1.
GraphExport export_graph(const cluster::SimilarityMatrix& s, const std::vector<std::string>& ids,
                         const std::vector<std::size_t>& labels,
                         const std::vector<std::optional<double>>& grades,
                         const std::vector<std::size_t>& representatives, double threshold);

// Convenience over an analysis; grades come from a report when one exists.
GraphExport export_graph(const Analysis& a, double threshold, const GradeReport* report = nullptr);

Json graph_to_json(const GraphExport& g);

}  // namespace mlp::io
