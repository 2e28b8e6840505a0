#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kpa/corpus.hpp"

namespace kpa {

/// Unordered argument pair inside one group, stored with i < j.
struct ArgumentPair {
  GroupKey group;
  std::string i;
  std::string j;

  /// Builds a pair, swapping the ids if needed. Throws on i == j.
  static ArgumentPair normalized(GroupKey group, std::string a, std::string b);

  auto operator<=>(const ArgumentPair&) const = default;
  bool operator==(const ArgumentPair&) const = default;
};

std::string to_string(const ArgumentPair& p);

struct PairLabel {
  ArgumentPair pair;
  bool intra_cluster = false;
  std::optional<std::string> shared_kp_text;

  bool operator==(const PairLabel&) const = default;
};

struct TrainingRecord {
  std::string pair_id;
  std::string input;
  std::string output;
};

struct LogitPair {
  double logit_yes = 0.0;
  double logit_no = 0.0;
};

struct PairPrediction {
  ArgumentPair pair;
  double share_score = 0.0;
  std::optional<std::string> key_point;

  bool operator==(const PairPrediction&) const = default;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

/// Every unordered pair of the group's arguments, (i, j) lexicographic.
std::vector<ArgumentPair> enumerate_pairs(const TopicStanceGroup& group);

/// Labels pairs from gold matches and caps how often an argument may occur in
/// retained intra-cluster pairs. Arguments are visited in arg_id order; for an
/// argument over the cap, a seeded uniform sample of its retained
/// intra-cluster pairs is kept and the rest dropped. Inter-cluster pairs are
/// always retained. Output keeps the input order.
std::vector<PairLabel> label_pairs(const std::vector<ArgumentPair>& pairs,
                                   const TopicStanceGroup& group,
                                   std::size_t max_intra_per_arg, std::uint64_t seed);

/// Word used for a stance inside model inputs: "positive" / "negative".
const char* stance_word(Stance s);

/// "{topic} | {stance_i}. {arg_i} | {stance_j}. {arg_j}"
std::string format_input(std::string_view topic, Stance stance_i, std::string_view arg_i,
                         Stance stance_j, std::string_view arg_j);

/// "Yes. {kp}" for intra-cluster labels, "No." otherwise.
std::string format_output(const PairLabel& label);

struct ParsedOutput {
  bool is_yes = false;
  std::optional<std::string> key_point;

  bool operator==(const ParsedOutput&) const = default;
};

/// Reads a model answer. The leading word decides Yes/No (case-insensitive);
/// anything else raises Error(Unparseable).
ParsedOutput parse_output(std::string_view text);

/// Two-way softmax over the first decoding step's Yes/No logits.
double share_score(LogitPair logits);

enum class UnparseablePolicy { TreatAsNo, Fail };

/// Prediction from one generation: score from the first-step logits, key
/// point from the decoded text. Unparseable text counts as No unless the
/// policy says Fail; a Yes with no key point text carries no key point.
PairPrediction prediction_from_generation(const ArgumentPair& pair, LogitPair logits, std::string_view output,
                                          UnparseablePolicy policy = UnparseablePolicy::TreatAsNo);

/// Training export for every group that carries labels. Randomness comes from
/// the "pair-sampling" substream of `seed`, keyed per group.
std::vector<TrainingRecord> build_training_records(const Dataset& d, std::size_t max_intra_per_arg,
                                                   std::uint64_t seed);

void write_training_records(const std::vector<TrainingRecord>& records,
                            const std::filesystem::path& path);

}  // namespace kpa
