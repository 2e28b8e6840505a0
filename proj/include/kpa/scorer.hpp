#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kpa/corpus.hpp"
#include "kpa/jsonl.hpp"
#include "kpa/pairing.hpp"

namespace kpa {

enum class ScorerBackend { File, Http, Oracle };

ScorerBackend parse_backend(std::string_view name);
const char* to_string(ScorerBackend b);

struct ScorerConfig {
  ScorerBackend backend = ScorerBackend::Oracle;
  /// predictions.jsonl path for File, base URL for Http, unused for Oracle.
  std::string source;
  double timeout_seconds = 30.0;
  std::size_t max_in_flight = 8;
  std::size_t retries = 2;
  /// Pairs per /v1/score_batch request; 1 disables the batch endpoint.
  std::size_t batch_size = 16;

  /// Throws Error(Precondition) on invariant violations.
  void check() const;
};

using PredictionIndex = std::map<ArgumentPair, PairPrediction>;

/// Parses predictions.jsonl. Pairs are normalized to i < j; a Yes answer with
/// an empty key point is stored with key_point absent.
PredictionIndex load_predictions(const std::filesystem::path& path);

void write_predictions(const std::vector<PairPrediction>& predictions,
                       const std::filesystem::path& path);

/// One prediction per requested pair, in request order. Missing pairs raise
/// Error(MissingPrediction) listing them.
std::vector<PairPrediction> score_from_file(const PredictionIndex& index,
                                            const std::vector<ArgumentPair>& pairs);
std::vector<PairPrediction> score_from_file(const std::filesystem::path& path,
                                            const std::vector<ArgumentPair>& pairs);

/// Gold-label scorer: 1.0 with the smallest shared key point text, else 0.0.
PairPrediction oracle_score(const TopicStanceGroup& group, const ArgumentPair& pair);

// ---- HTTP backend -------------------------------------------------------

/// Base URL split into what the HTTP client needs.
struct HttpTarget {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // "" or "/prefix" without trailing slash

  static HttpTarget parse(const std::string& url);
};

/// Everything the service needs to score one pair.
struct ScoreRequest {
  ArgumentPair pair;
  Stance stance_i = Stance::Pro;
  std::string arg_i;
  Stance stance_j = Stance::Pro;
  std::string arg_j;

  json body() const;
};

std::vector<ScoreRequest> make_score_requests(const TopicStanceGroup& group,
                                              const std::vector<ArgumentPair>& pairs);

struct PairFailure {
  ArgumentPair pair;
  std::string reason;
};

struct HttpScoreResult {
  /// Successful predictions, in request order.
  std::vector<PairPrediction> predictions;
  std::vector<PairFailure> failures;
};

/// Scores pairs against a remote service with at most `max_in_flight`
/// requests outstanding. A failing pair never affects the others.
HttpScoreResult score_from_http(const ScorerConfig& cfg, const std::vector<ScoreRequest>& requests);

/// Parses one service response object into a prediction for `pair`.
/// Throws Error(Parse) if the body does not conform.
PairPrediction parse_score_response(const ArgumentPair& pair, const json& body);

/// POSTs a JSON body, retrying transport failures. Returns the parsed body of
/// a 200 response; throws Error(Transport) otherwise.
json post_json(const HttpTarget& target, const std::string& path, const json& body,
               double timeout_seconds, std::size_t retries);

/// Dispatches on cfg.backend for one group. Any per-pair failure becomes an
/// Error naming the failed pairs.
std::vector<PairPrediction> score_group(const ScorerConfig& cfg, const TopicStanceGroup& group,
                                        const std::vector<ArgumentPair>& pairs,
                                        const PredictionIndex* file_index = nullptr);

}  // namespace kpa
