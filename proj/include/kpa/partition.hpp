#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpa/corpus.hpp"
#include "kpa/embedding.hpp"
#include "kpa/graph.hpp"
#include "kpa/jsonl.hpp"

namespace kpa {

enum class KMeansInit {
  /// k distinct points uniformly without replacement.
  Uniform,
  /// k-means++ D^2 seeding over distinct points.
  PlusPlus,
};

KMeansInit parse_kmeans_init(std::string_view name);
const char* to_string(KMeansInit init);

struct KMeansOptions {
  std::size_t max_iters = 100;
  /// Independent Lloyd runs; the lowest inertia wins.
  std::size_t restarts = 30;
  KMeansInit init = KMeansInit::PlusPlus;
};

struct PartitionConfig {
  std::size_t num_subgraphs = 1;
  double threshold_h = 0.008;
  std::size_t max_steps = 200;
  std::uint64_t seed = 42;
  KMeansOptions kmeans;

  /// Throws Error(Precondition) unless 1 <= num_subgraphs <= vertex_count
  /// and threshold_h >= 0.
  void check(std::size_t vertex_count) const;
};

/// One applied vertex relocation.
struct MoveRecord {
  std::size_t step = 0;
  std::string vertex;
  std::size_t from = 0;
  std::size_t to = 0;
  double cost = 0.0;
  /// Kept in `from` because removing it would drop wt(from) by more than h.
  bool soft = false;
  /// Kept in `from` because it was the only member.
  bool guard = false;

  bool operator==(const MoveRecord&) const = default;
};

/// Possibly overlapping vertex sets plus the moves that produced them.
struct Partition {
  std::vector<VertexSet> subgraphs;
  std::vector<MoveRecord> moves;

  bool operator==(const Partition&) const = default;
};

// ---- k-means initialization -------------------------------------------

struct KMeansResult {
  /// Cluster index per point.
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm on Euclidean distance. Initial centroids are k distinct
/// points (see KMeansInit); distance ties go to the lowest centroid index; an
/// empty cluster takes the point farthest from its own centroid. Stops when
/// assignments stop changing or after max_iters. With restarts > 1 the run
/// with the lowest inertia wins (earliest on ties); all runs draw from one
/// generator seeded by `seed`.
KMeansResult kmeans(std::span<const std::vector<double>> points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& opt = {});

/// Hard partition of `vertices` (in order) from their embeddings.
Partition kmeans_init(const EmbeddingTable& emb, const std::vector<std::string>& vertices,
                      std::size_t s, std::uint64_t seed, const KMeansOptions& opt = {});

// ---- local search ------------------------------------------------------

/// Index-based view of a soft partition over a graph, with per-subgraph edge
/// sums so that the cost of a move is O(degree).
class PartitionState {
 public:
  PartitionState(const ArgumentGraph& g, const Partition& p);

  std::size_t subgraph_count() const { return members_.size(); }
  bool contains(std::size_t sub, std::size_t v) const { return in_[sub][v] != 0; }
  const std::vector<std::size_t>& members(std::size_t sub) const { return members_[sub]; }

  double weight(std::size_t sub) const;
  double weight_without(std::size_t sub, std::size_t v) const;
  double weight_with(std::size_t sub, std::size_t v) const;

  /// wt(out \ v) - wt(out) + wt(in + v) - wt(in).
  double move_cost(std::size_t v, std::size_t out, std::size_t in) const;

  /// Best target for moving v out of `out`; nullopt if v is already in every
  /// other subgraph. Ties go to the lowest index.
  std::optional<std::pair<std::size_t, double>> best_target(std::size_t v, std::size_t out) const;

  void insert(std::size_t sub, std::size_t v);
  void erase(std::size_t sub, std::size_t v);

  Partition to_partition() const;

 private:
  struct Links {
    double sum = 0.0;
    std::size_t count = 0;
  };
  Links links(std::size_t sub, std::size_t v) const;
  void recompute(std::size_t sub);

  const ArgumentGraph* g_;
  std::vector<std::vector<char>> in_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<double> sum_;
  std::vector<std::size_t> count_;
};

/// Set-level cost of moving `v` from subgraph out_idx to in_idx. Throws
/// Error(Precondition) unless v is in out_idx, not in in_idx, and the
/// indices differ.
double move_cost(const ArgumentGraph& g, const Partition& p, std::string_view v, std::size_t out_idx,
                 std::size_t in_idx);

/// argmax of move_cost over subgraphs not containing v. Throws
/// Error(Precondition) when no target is eligible.
std::pair<std::size_t, double> best_target(const ArgumentGraph& g, const Partition& p,
                                           std::string_view v, std::size_t out_idx);

/// Attempts one relocation of vertex v out of `out`: picks the best target
/// and applies the move if its cost is positive, keeping a soft copy in `out`
/// when wt(out) - wt(out \ v) > h or when v is the only member of `out`.
std::optional<MoveRecord> try_move(PartitionState& state, const ArgumentGraph& g, std::size_t v,
                                   std::size_t out, double threshold_h, std::size_t step);

/// Randomized local search from `init`, up to cfg.max_steps relocation
/// attempts. After every |V| consecutive attempts without a move a full sweep
/// checks whether any positive move remains; if none does, the search stops.
Partition local_search(const ArgumentGraph& g, const Partition& init, const PartitionConfig& cfg);

// ---- key point selection -----------------------------------------------

struct SupportingEdge {
  std::string u;
  std::string v;
  double weight = 0.0;

  bool operator==(const SupportingEdge&) const = default;
};

struct KeyPointResult {
  std::size_t subgraph = 0;
  std::optional<std::string> key_point;
  std::optional<SupportingEdge> edge;
  VertexSet members;
  double prevalence = 0.0;
  std::optional<std::string> diagnostic;

  bool operator==(const KeyPointResult&) const = default;
};

/// Per subgraph, the key point of its heaviest induced edge (ties: smallest
/// key point text, then smallest (u, v)).
std::vector<KeyPointResult> select_key_points(const ArgumentGraph& g, const Partition& p);

struct Prevalence {
  std::optional<std::string> key_point;
  double fraction = 0.0;

  bool operator==(const Prevalence&) const = default;
};

std::vector<Prevalence> prevalence_report(const std::vector<KeyPointResult>& results,
                                          std::size_t group_size);
std::vector<Prevalence> prevalence_report(const std::vector<KeyPointResult>& results,
                                          const TopicStanceGroup& group);

// ---- partition.json ----------------------------------------------------

struct PartitionDocument {
  GroupKey group;
  Partition partition;
  std::vector<KeyPointResult> key_points;

  bool operator==(const PartitionDocument&) const = default;
};

json partition_to_json(const PartitionDocument& doc);
PartitionDocument partition_from_json(const json& doc, const std::string& origin = "partition");
void write_partition(const PartitionDocument& doc, const std::filesystem::path& path);
PartitionDocument read_partition(const std::filesystem::path& path);

}  // namespace kpa
