#include "kpa/scorer.hpp"

#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/text.hpp"

namespace kpa {

ScorerBackend parse_backend(std::string_view name) {
  if (name == "file") return ScorerBackend::File;
  if (name == "http") return ScorerBackend::Http;
  if (name == "oracle") return ScorerBackend::Oracle;
  throw Error(ErrorKind::Parse, "unknown scorer backend \"" + std::string(name) + "\"");
}

const char* to_string(ScorerBackend b) {
  switch (b) {
    case ScorerBackend::File: return "file";
    case ScorerBackend::Http: return "http";
    case ScorerBackend::Oracle: return "oracle";
  }
  return "?";
}

void ScorerConfig::check() const {
  if (max_in_flight < 1) throw Error(ErrorKind::Precondition, "max_in_flight must be >= 1");
  if (!(timeout_seconds > 0)) throw Error(ErrorKind::Precondition, "timeout must be positive");
  if (batch_size < 1) throw Error(ErrorKind::Precondition, "batch_size must be >= 1");
  if (backend != ScorerBackend::Oracle && source.empty()) {
    throw Error(ErrorKind::Precondition, std::string(to_string(backend)) + " backend needs a source");
  }
}

PredictionIndex load_predictions(const std::filesystem::path& path) {
  PredictionIndex index;
  for_each_jsonl(path, [&](const json& rec, const RecordLocation& at) {
    const std::string topic = require_string(rec, "topic", at);
    const std::string stance_token = require_string(rec, "stance", at);
    auto stance = parse_stance(stance_token);
    if (!stance) throw Error(ErrorKind::Parse, at.str() + ": unknown stance \"" + stance_token + "\"");
    const std::string a = require_string(rec, "arg_i", at);
    const std::string b = require_string(rec, "arg_j", at);
    if (a == b) throw Error(ErrorKind::Parse, at.str() + ": arg_i equals arg_j");
    const double score = require_number(rec, "share_score", at);
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorKind::Range, at.str() + ": share_score " + std::to_string(score) +
                                        " outside [0,1]");
    }
    auto kp = optional_string(rec, "key_point", at);
    if (kp && trim(*kp).empty()) {
      spdlog::info("{}: empty key point treated as no shared key point", at.str());
      kp.reset();
    }
    auto pair = ArgumentPair::normalized({topic, *stance}, a, b);
    PairPrediction p{pair, score, kp ? std::optional<std::string>(trim(*kp)) : std::nullopt};
    if (!index.emplace(pair, std::move(p)).second) {
      throw Error(ErrorKind::Duplicate, at.str() + ": duplicate prediction for " + to_string(pair));
    }
  });
  return index;
}

void write_predictions(const std::vector<PairPrediction>& predictions,
                       const std::filesystem::path& path) {
  std::vector<json> rows;
  rows.reserve(predictions.size());
  for (const auto& p : predictions) {
    rows.push_back({{"topic", p.pair.group.topic},
                    {"stance", to_string(p.pair.group.stance)},
                    {"arg_i", p.pair.i},
                    {"arg_j", p.pair.j},
                    {"share_score", p.share_score},
                    {"key_point", p.key_point ? json(*p.key_point) : json(nullptr)}});
  }
  write_text_file(path, to_jsonl(rows));
}

std::vector<PairPrediction> score_from_file(const PredictionIndex& index,
                                            const std::vector<ArgumentPair>& pairs) {
  std::vector<PairPrediction> out;
  out.reserve(pairs.size());
  std::vector<std::string> missing;
  for (const auto& p : pairs) {
    auto it = index.find(p);
    if (it == index.end()) {
      missing.push_back(to_string(p));
    } else {
      out.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " pair(s) missing from predictions:";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) msg += " " + missing[k];
    if (shown < missing.size()) msg += " ...";
    throw Error(ErrorKind::MissingPrediction, msg);
  }
  return out;
}

std::vector<PairPrediction> score_from_file(const std::filesystem::path& path,
                                            const std::vector<ArgumentPair>& pairs) {
  return score_from_file(load_predictions(path), pairs);
}

PairPrediction oracle_score(const TopicStanceGroup& group, const ArgumentPair& pair) {
  if (pair.group != group.key || !group.find_argument(pair.i) || !group.find_argument(pair.j)) {
    throw Error(ErrorKind::Reference, "pair " + to_string(pair) + " is outside group " +
                                          to_string(group.key));
  }
  auto norm = ArgumentPair::normalized(pair.group, pair.i, pair.j);
  auto kp = group.shared_key_point(norm.i, norm.j);
  return {std::move(norm), kp ? 1.0 : 0.0, std::move(kp)};
}

std::vector<PairPrediction> score_group(const ScorerConfig& cfg, const TopicStanceGroup& group,
                                        const std::vector<ArgumentPair>& pairs,
                                        const PredictionIndex* file_index) {
  switch (cfg.backend) {
    case ScorerBackend::Oracle: {
      std::vector<PairPrediction> out;
      out.reserve(pairs.size());
      for (const auto& p : pairs) out.push_back(oracle_score(group, p));
      return out;
    }
    case ScorerBackend::File:
      return file_index ? score_from_file(*file_index, pairs) : score_from_file(cfg.source, pairs);
    case ScorerBackend::Http: {
      auto result = score_from_http(cfg, make_score_requests(group, pairs));
      if (!result.failures.empty()) {
        std::string msg = std::to_string(result.failures.size()) + " pair(s) failed:";
        for (const auto& f : result.failures) msg += "\n  " + to_string(f.pair) + ": " + f.reason;
        throw Error(ErrorKind::Transport, msg);
      }
      return std::move(result.predictions);
    }
  }
  return {};
}

}  // namespace kpa
