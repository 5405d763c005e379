#include "mlp/io/graph.hpp"

#include "mlp/error.hpp"

#include <algorithm>

namespace mlp::io {

GraphExport export_graph(const cluster::SimilarityMatrix& s, const std::vector<std::string>& ids,
                         const std::vector<std::size_t>& labels,
                         const std::vector<std::optional<double>>& grades,
                         const std::vector<std::size_t>& representatives, double threshold) {
  if (!(threshold > 0 && threshold <= 1)) {
    throw Error(ErrorKind::InvalidArgument, "graph threshold must lie in (0, 1]");
  }
  const std::size_t n = s.size();
  if (ids.size() != n || labels.size() != n || (!grades.empty() && grades.size() != n)) {
    throw Error(ErrorKind::CountMismatch, "graph inputs disagree on the number of solutions");
  }
  GraphExport g;
  g.threshold = threshold;
  for (std::size_t j = 0; j < n; ++j) {
    GraphNode node;
    node.id = ids[j];
    node.cluster = labels[j];
    if (!grades.empty()) node.grade = grades[j];
    node.representative = std::find(representatives.begin(), representatives.end(), j) != representatives.end();
    g.nodes.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = s(i, j);
      if (w > 0 && w >= threshold) g.edges.push_back({i, j, w});
    }
  }
  return g;
}

GraphExport export_graph(const Analysis& a, double threshold, const GradeReport* report) {
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < a.size(); ++j) ids.push_back(a.id(j));
  std::vector<std::optional<double>> grades;
  if (report) {
    for (const auto& e : report->entries) grades.emplace_back(e.grade);
  }
  return export_graph(a.similarity, ids, a.assignment.labels, grades, a.representatives.indices, threshold);
}

Json graph_to_json(const GraphExport& g) {
  Json j;
  j["schema"] = kGraphSchema;
  j["threshold"] = g.threshold;
  Json nodes = Json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"cluster", n.cluster},
                     {"grade", n.grade ? Json(*n.grade) : Json(nullptr)},
                     {"representative", n.representative}});
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"source", g.nodes[e.source].id}, {"target", g.nodes[e.target].id}, {"weight", e.weight}});
  }
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace mlp::io
