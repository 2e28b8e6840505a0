#include "kpa/graph.hpp"

#include <algorithm>

#include "kpa/error.hpp"
#include "kpa/text.hpp"

namespace kpa {

ArgumentGraph::ArgumentGraph(GroupKey group, std::vector<std::string> vertices, std::vector<Edge> edges)
    : group_(std::move(group)), vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
    throw Error(ErrorKind::Duplicate, "duplicate vertex in graph " + to_string(group_));
  }
  for (std::size_t k = 0; k < vertices_.size(); ++k) index_.emplace(vertices_[k], k);

  for (auto& e : edges_) {
    if (e.u == e.v) throw Error(ErrorKind::Precondition, "self-loop on " + e.u);
    if (e.v < e.u) std::swap(e.u, e.v);
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
      throw Error(ErrorKind::Range, "edge " + e.u + "-" + e.v + " weight outside [0,1]");
    }
    if (trim(e.key_point).empty()) {
      throw Error(ErrorKind::Precondition, "edge " + e.u + "-" + e.v + " has no key point");
    }
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].u == edges_[k - 1].u && edges_[k].v == edges_[k - 1].v) {
      throw Error(ErrorKind::Duplicate, "duplicate edge " + edges_[k].u + "-" + edges_[k].v);
    }
  }
  adjacency_.resize(vertices_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const std::size_t a = require_index(edges_[k].u);
    const std::size_t b = require_index(edges_[k].v);
    adjacency_[a].push_back({b, k, edges_[k].weight});
    adjacency_[b].push_back({a, k, edges_[k].weight});
  }
}

std::optional<std::size_t> ArgumentGraph::index_of(std::string_view arg_id) const {
  auto it = index_.find(std::string(arg_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ArgumentGraph::require_index(std::string_view arg_id) const {
  auto idx = index_of(arg_id);
  if (!idx) {
    throw Error(ErrorKind::Reference, "argument \"" + std::string(arg_id) + "\" is not a vertex of " +
                                          to_string(group_));
  }
  return *idx;
}

std::vector<Edge> ArgumentGraph::incident_edges(std::string_view arg_id) const {
  std::vector<Edge> out;
  for (const auto& n : adjacency_[require_index(arg_id)]) out.push_back(edges_[n.edge]);
  return out;
}

ArgumentGraph build_graph(const TopicStanceGroup& group, const std::vector<PairPrediction>& predictions,
                          const EdgeRule& rule) {
  std::vector<std::string> vertices;
  vertices.reserve(group.arguments.size());
  for (const auto& a : group.arguments) vertices.push_back(a.arg_id);

  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Edge> edges;
  for (const auto& p : predictions) {
    if (p.pair.group != group.key || !group.find_argument(p.pair.i) ||
        !group.find_argument(p.pair.j)) {
      throw Error(ErrorKind::Reference, "prediction " + to_string(p.pair) + " is outside group " +
                                            to_string(group.key));
    }
    auto norm = ArgumentPair::normalized(p.pair.group, p.pair.i, p.pair.j);
    if (!seen.emplace(norm.i, norm.j).second) {
      throw Error(ErrorKind::Duplicate, "ambiguous edge: duplicate prediction for " + to_string(norm));
    }
    if (!p.key_point || trim(*p.key_point).empty() || p.share_score < rule.min_score) continue;
    edges.push_back({norm.i, norm.j, p.share_score, *p.key_point});
  }
  return ArgumentGraph(group.key, std::move(vertices), std::move(edges));
}

namespace {
std::vector<char> membership(const ArgumentGraph& g, const VertexSet& s) {
  std::vector<char> in(g.vertex_count(), 0);
  for (const auto& id : s) in[g.require_index(id)] = 1;
  return in;
}
}  // namespace

std::vector<Edge> induced_edges(const ArgumentGraph& g, const VertexSet& s) {
  const auto in = membership(g, s);
  std::vector<Edge> out;
  for (const auto& e : g.edges()) {
    if (in[*g.index_of(e.u)] && in[*g.index_of(e.v)]) out.push_back(e);
  }
  return out;
}

double subgraph_weight(const ArgumentGraph& g, const VertexSet& s) {
  const auto in = membership(g, s);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto& e = g.edges()[k];
    if (in[*g.index_of(e.u)] && in[*g.index_of(e.v)]) {
      sum += e.weight;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

json graph_to_json(const ArgumentGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"weight", e.weight}, {"key_point", e.key_point}});
  }
  return {{"topic", g.group().topic},
          {"stance", to_string(g.group().stance)},
          {"vertices", g.vertices()},
          {"edges", std::move(edges)}};
}

ArgumentGraph graph_from_json(const json& doc, const std::string& origin) {
  const RecordLocation at{origin, 1};
  if (!doc.is_object()) throw Error(ErrorKind::Parse, origin + ": graph is not an object");
  const std::string stance_token = require_string(doc, "stance", at);
  auto stance = parse_stance(stance_token);
  if (!stance) throw Error(ErrorKind::Parse, origin + ": unknown stance \"" + stance_token + "\"");
  GroupKey key{require_string(doc, "topic", at), *stance};

  auto vs = doc.find("vertices");
  auto es = doc.find("edges");
  if (vs == doc.end() || !vs->is_array() || es == doc.end() || !es->is_array()) {
    throw Error(ErrorKind::Parse, origin + ": graph needs \"vertices\" and \"edges\" arrays");
  }
  std::vector<std::string> vertices;
  for (const auto& v : *vs) {
    if (!v.is_string()) throw Error(ErrorKind::Parse, origin + ": vertex ids must be strings");
    vertices.push_back(v.get<std::string>());
  }
  std::vector<Edge> edges;
  for (const auto& e : *es) {
    edges.push_back({require_string(e, "u", at), require_string(e, "v", at),
                     require_number(e, "weight", at), require_string(e, "key_point", at)});
  }
  return ArgumentGraph(std::move(key), std::move(vertices), std::move(edges));
}

void write_graph(const ArgumentGraph& g, const std::filesystem::path& path) {
  write_text_file(path, dump_document(graph_to_json(g)));
}

ArgumentGraph read_graph(const std::filesystem::path& path) {
  return graph_from_json(read_json_file(path), path.string());
}

}  // namespace kpa
