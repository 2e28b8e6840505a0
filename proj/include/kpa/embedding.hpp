#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kpa/corpus.hpp"

namespace kpa {

/// Argument representations used to seed the partition.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  /// Throws Error(Range) if any id in `ids` is missing, or Error(Precondition)
  /// on length mismatch / non-finite entries.
  void check_covers(const std::vector<std::string>& ids) const;

  /// Inserts or replaces one vector; the first insert fixes `dim`.
  void add(std::string arg_id, std::vector<double> vector);
};

/// Reads embeddings.jsonl: {"arg_id": string, "vector": [number, ...]}.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

inline constexpr std::size_t kHashedEmbeddingDim = 256;

/// Offline stand-in for a sentence encoder: signed feature hashing of the
/// metric tokens into `dim` buckets, L2-normalized. Deterministic in `seed`.
std::vector<double> hashed_bow_embedding(std::string_view text, std::uint64_t seed,
                                         std::size_t dim = kHashedEmbeddingDim);

EmbeddingTable embed_arguments(const std::vector<Argument>& args, std::uint64_t seed,
                               std::size_t dim = kHashedEmbeddingDim);

}  // namespace kpa
