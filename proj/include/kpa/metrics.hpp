#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kpa/corpus.hpp"
#include "kpa/jsonl.hpp"

namespace kpa {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const Prf&) const = default;
};

/// ROUGE-N over the metric tokenization (see tokenize()). Clipped n-gram
/// overlap; any empty side yields zeros.
Prf rouge_n(std::string_view candidate, std::string_view reference, int n);

/// Similarity between a reference key point and a generated one, in that
/// argument order. Must be deterministic and bounded to [0,1].
struct SimilarityFn {
  std::string name;
  std::function<double(const std::string& reference, const std::string& generated)> score;
};

/// Unigram F1 between the two texts; 1 for two empty texts.
double token_f1_sim(std::string_view a, std::string_view b);

SimilarityFn token_f1_similarity();
/// 1 when the trimmed texts are byte-equal, else 0.
SimilarityFn exact_match_similarity();
/// Remote similarity: POST {base}/v1/similarity {"reference","generated"}
/// answered by {"score": number}.
SimilarityFn http_similarity(const std::string& url, double timeout_seconds = 30.0,
                             std::size_t retries = 2);

/// "token-f1" | "exact" | "http:<url>".
SimilarityFn make_similarity(const std::string& spec);

struct SoftPrf {
  double sP = 0.0;
  double sR = 0.0;
  double sF1 = 0.0;

  bool operator==(const SoftPrf&) const = default;
};

/// Set-level soft precision / recall / F1. Throws Error(Precondition) on an
/// empty list.
SoftPrf soft_prf(const std::vector<std::string>& generated, const std::vector<std::string>& reference,
                 const SimilarityFn& sim);

struct GroupScores {
  GroupKey group;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  SoftPrf soft;
  std::size_t generated_count = 0;
  std::size_t reference_count = 0;
  std::vector<std::string> flags;
};

struct MacroScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double sP = 0.0;
  double sR = 0.0;
  double sF1 = 0.0;
};

struct EvalReport {
  std::vector<GroupScores> groups;
  MacroScores macro;
  std::string sim_name;
};

using GeneratedKeyPoints = std::map<GroupKey, std::vector<std::string>>;

/// Scores each generated group against its references. Rouge compares the
/// ". "-joined generated key points (given order) with the ". "-joined
/// references (kp_id order). Macro scores are plain means over groups.
EvalReport evaluate(const GeneratedKeyPoints& generated, const Dataset& dataset, const SimilarityFn& sim);

json report_to_json(const EvalReport& report);

}  // namespace kpa
