#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kpa/corpus.hpp"
#include "kpa/embedding.hpp"
#include "kpa/graph.hpp"
#include "kpa/jsonl.hpp"
#include "kpa/metrics.hpp"
#include "kpa/partition.hpp"
#include "kpa/scorer.hpp"

namespace kpa {

inline constexpr const char* kFallbackEmbeddings = "fallback";

/// Everything one end-to-end run needs. Mirrors the JSON config document.
struct PipelineConfig {
  std::filesystem::path data_dir;
  std::filesystem::path output_dir = "kpa-out";
  ScorerConfig scorer;
  /// embeddings.jsonl path, or "fallback" for the built-in hashed embedder.
  std::string embeddings = kFallbackEmbeddings;
  /// nullopt = one subgraph per reference key point of the group.
  std::optional<std::size_t> num_subgraphs;
  double threshold_h = 0.008;
  std::size_t max_steps = 200;
  KMeansOptions kmeans;
  std::uint64_t seed = 42;
  std::string similarity = "token-f1";
  EdgeRule edge_rule;

  /// Overlays fields present in `doc` onto this config.
  void merge_json(const json& doc);
  json to_json() const;
};

/// Scores every enumerated pair of every group, in group then pair order.
std::vector<PairPrediction> score_dataset(const Dataset& d, const ScorerConfig& cfg);

std::vector<ArgumentGraph> build_graphs(const Dataset& d, const std::vector<PairPrediction>& predictions,
                                        const EdgeRule& rule = {});

/// Resolves the subgraph count for one group: explicit value or the
/// reference key-point count, clamped to the vertex count.
std::size_t resolve_num_subgraphs(std::optional<std::size_t> requested, const TopicStanceGroup* group,
                                  std::size_t vertex_count);

struct GroupPartition {
  PartitionDocument initial;
  PartitionDocument refined;
};

/// k-means initialization followed by local search for one graph.
GroupPartition partition_graph(const ArgumentGraph& g, const EmbeddingTable& emb, std::size_t s,
                               double threshold_h, std::size_t max_steps, const KMeansOptions& kmeans,
                               std::uint64_t seed);

/// Key points of each document, keyed by group; edgeless subgraphs skipped.
GeneratedKeyPoints collect_generated(const std::vector<PartitionDocument>& docs);

/// Stable, filesystem-safe file stem for a group.
std::string group_file_stem(const GroupKey& key);

struct PipelineResult {
  std::vector<ArgumentGraph> graphs;
  std::vector<GroupPartition> partitions;
  std::optional<EvalReport> report;
};

/// load -> score -> graph -> partition -> select -> evaluate, writing every
/// intermediate artifact under cfg.output_dir. Failures surface as
/// StageError tagged with the stage name.
PipelineResult run_pipeline(const PipelineConfig& cfg);

std::string format_summary(const PipelineResult& result);

}  // namespace kpa
