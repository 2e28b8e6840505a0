#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "kpa/corpus.hpp"
#include "kpa/graph.hpp"
#include "kpa/partition.hpp"
#include "kpa/random.hpp"

namespace kpa::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("kpa-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const GroupKey& test_key() {
  static const GroupKey k{"T", Stance::Pro};
  return k;
}

/// Graph over `vertices` with edges (u, v, weight), every key point "K".
inline ArgumentGraph make_graph(std::vector<std::string> vertices,
                                const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  std::vector<Edge> es;
  for (const auto& [u, v, w] : edges) es.push_back({u, v, w, "K"});
  return ArgumentGraph(test_key(), std::move(vertices), std::move(es));
}

/// Vertex ids v00, v01, ... (zero-padded so string order is index order).
inline std::vector<std::string> vertex_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back((i < 10 ? "v0" : "v") + std::to_string(i));
  return ids;
}

/// Random graph: each pair is an edge with probability percent/100, weight
/// uniform on a 1/1000 grid in (0, 1].
inline ArgumentGraph random_graph(Rng& rng, std::size_t n, std::size_t percent) {
  const auto ids = vertex_ids(n);
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (uniform_index(rng, 100) >= percent) continue;
      edges.emplace_back(ids[a], ids[b], static_cast<double>(1 + uniform_index(rng, 1000)) / 1000.0);
    }
  }
  return make_graph(ids, edges);
}

/// Random hard partition of the graph's vertices into k non-empty blocks.
inline Partition random_partition(Rng& rng, const ArgumentGraph& g, std::size_t k) {
  const auto& v = g.vertices();
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  Partition p;
  p.subgraphs.resize(k);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t block = i < k ? i : uniform_index(rng, k);
    p.subgraphs[block].insert(v[order[i]]);
  }
  return p;
}

/// Group with the given arguments (text = id) and gold matches (arg, kp text).
inline TopicStanceGroup make_group(const std::vector<std::string>& args,
                                   const std::vector<std::pair<std::string, std::string>>& matches) {
  TopicStanceGroup g;
  g.key = test_key();
  for (const auto& a : args) g.arguments.push_back({a, g.key.topic, g.key.stance, "text of " + a});
  std::sort(g.arguments.begin(), g.arguments.end(),
            [](const Argument& x, const Argument& y) { return x.arg_id < y.arg_id; });
  std::vector<std::string> kps;
  for (const auto& [a, k] : matches) {
    if (std::find(kps.begin(), kps.end(), k) == kps.end()) kps.push_back(k);
  }
  std::sort(kps.begin(), kps.end());
  // Zero-padded so id order matches text order; lookups binary-search by id.
  auto kp_id = [](std::size_t i) { return "kp_" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") + std::to_string(i); };
  for (std::size_t i = 0; i < kps.size(); ++i) {
    g.reference_kps.push_back({kp_id(i), g.key.topic, g.key.stance, kps[i]});
  }
  for (const auto& [a, k] : matches) {
    g.labels.push_back({a, kp_id(std::find(kps.begin(), kps.end(), k) - kps.begin()), true});
  }
  std::sort(g.labels.begin(), g.labels.end(), [](const MatchLabel& x, const MatchLabel& y) {
    return std::tie(x.arg_id, x.kp_id) < std::tie(y.arg_id, y.kp_id);
  });
  return g;
}

}  // namespace kpa::testing
