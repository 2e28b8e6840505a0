#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kpa/corpus.hpp"
#include "kpa/jsonl.hpp"
#include "kpa/pairing.hpp"

namespace kpa {

struct Edge {
  std::string u;
  std::string v;
  double weight = 0.0;
  std::string key_point;

  bool operator==(const Edge&) const = default;
};

using VertexSet = std::set<std::string>;

/// Incidence entry used by the index-based API.
struct Neighbor {
  std::size_t vertex;
  std::size_t edge;
  double weight;
};

/// Weighted argument graph of one group. Vertices are the group's arg_ids in
/// sorted order; edges are sorted by (u, v) with u < v.
class ArgumentGraph {
 public:
  ArgumentGraph() = default;

  /// Validates and indexes the parts. Throws on self-loops, duplicate edges,
  /// unknown endpoints, weights outside [0,1] or empty key points.
  ArgumentGraph(GroupKey group, std::vector<std::string> vertices, std::vector<Edge> edges);

  const GroupKey& group() const { return group_; }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }

  std::optional<std::size_t> index_of(std::string_view arg_id) const;
  /// Like index_of but throws Error(Reference) for unknown ids.
  std::size_t require_index(std::string_view arg_id) const;

  std::span<const Neighbor> neighbors(std::size_t vertex) const { return adjacency_[vertex]; }
  /// Edges incident to `arg_id`.
  std::vector<Edge> incident_edges(std::string_view arg_id) const;

  bool operator==(const ArgumentGraph& o) const {
    return group_ == o.group_ && vertices_ == o.vertices_ && edges_ == o.edges_;
  }

 private:
  GroupKey group_;
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

struct EdgeRule {
  /// Predictions below this score never form an edge. The default admits
  /// every prediction that carries a key point.
  double min_score = 0.0;
};

/// One vertex per group argument; one edge per prediction carrying a key point.
ArgumentGraph build_graph(const TopicStanceGroup& group, const std::vector<PairPrediction>& predictions,
                          const EdgeRule& rule = {});

/// Edges with both endpoints in `s`, in (u, v) order.
std::vector<Edge> induced_edges(const ArgumentGraph& g, const VertexSet& s);

/// Mean weight of the edges induced by `s`; 0 when there are none.
double subgraph_weight(const ArgumentGraph& g, const VertexSet& s);

json graph_to_json(const ArgumentGraph& g);
ArgumentGraph graph_from_json(const json& doc, const std::string& origin = "graph");

void write_graph(const ArgumentGraph& g, const std::filesystem::path& path);
ArgumentGraph read_graph(const std::filesystem::path& path);

}  // namespace kpa
