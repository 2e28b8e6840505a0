#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <variant>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/scorer.hpp"
#include "kpa/text.hpp"

namespace kpa {

HttpTarget HttpTarget::parse(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::Parse, "URL needs a scheme: \"" + url + "\"");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  HttpTarget t;
  t.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    t.base_path = url.substr(path_start);
    while (!t.base_path.empty() && t.base_path.back() == '/') t.base_path.pop_back();
  }
  return t;
}

json ScoreRequest::body() const {
  return {{"topic", pair.group.topic},
          {"stance_i", to_string(stance_i)},
          {"arg_i", arg_i},
          {"stance_j", to_string(stance_j)},
          {"arg_j", arg_j}};
}

std::vector<ScoreRequest> make_score_requests(const TopicStanceGroup& group,
                                              const std::vector<ArgumentPair>& pairs) {
  std::vector<ScoreRequest> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const Argument* a = group.find_argument(p.i);
    const Argument* b = group.find_argument(p.j);
    if (p.group != group.key || !a || !b) {
      throw Error(ErrorKind::Reference, "pair " + to_string(p) + " is outside group " +
                                            to_string(group.key));
    }
    out.push_back({p, a->stance, a->text, b->stance, b->text});
  }
  return out;
}

PairPrediction parse_score_response(const ArgumentPair& pair, const json& body) {
  if (!body.is_object()) throw Error(ErrorKind::Parse, "response is not a JSON object");
  auto s = body.find("share_score");
  if (s == body.end() || !s->is_number()) {
    throw Error(ErrorKind::Parse, "response lacks numeric share_score");
  }
  const double score = s->get<double>();
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorKind::Range, "share_score " + std::to_string(score) + " outside [0,1]");
  }
  std::optional<std::string> kp;
  auto k = body.find("key_point");
  if (k != body.end() && !k->is_null()) {
    if (!k->is_string()) throw Error(ErrorKind::Parse, "key_point must be a string or null");
    std::string text = trim(k->get<std::string>());
    if (text.empty()) {
      spdlog::info("{}: service answered with an empty key point; no edge", to_string(pair));
    } else {
      kp = std::move(text);
    }
  }
  return {pair, score, std::move(kp)};
}

namespace {

void apply_timeouts(httplib::Client& cli, double timeout_seconds) {
  const auto sec = static_cast<time_t>(std::floor(timeout_seconds));
  const auto usec = static_cast<time_t>((timeout_seconds - static_cast<double>(sec)) * 1e6);
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
}

struct HttpFailure {
  int status = 0;  // 0 = transport failure
  std::string reason;
};

/// Returns the parsed JSON body or a failure; transport failures are retried.
std::variant<json, HttpFailure> post_once_with_retries(httplib::Client& cli, const std::string& path,
                                                       const std::string& payload,
                                                       std::size_t retries) {
  HttpFailure last;
  for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
    auto res = cli.Post(path, payload, "application/json");
    if (!res) {
      last = {0, "transport failure: " + httplib::to_string(res.error())};
      continue;
    }
    if (res->status != 200) {
      return HttpFailure{res->status, "HTTP " + std::to_string(res->status) + ": " + res->body};
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      return HttpFailure{res->status, std::string("malformed response body: ") + e.what()};
    }
  }
  return last;
}

}  // namespace

json post_json(const HttpTarget& target, const std::string& path, const json& body,
               double timeout_seconds, std::size_t retries) {
  httplib::Client cli(target.origin);
  apply_timeouts(cli, timeout_seconds);
  auto r = post_once_with_retries(cli, target.base_path + path, body.dump(), retries);
  if (auto* f = std::get_if<HttpFailure>(&r)) {
    throw Error(ErrorKind::Transport, target.origin + target.base_path + path + ": " + f->reason);
  }
  return std::get<json>(std::move(r));
}

HttpScoreResult score_from_http(const ScorerConfig& cfg, const std::vector<ScoreRequest>& requests) {
  cfg.check();
  const HttpTarget target = HttpTarget::parse(cfg.source);
  const std::string single_path = target.base_path + "/v1/score";
  const std::string batch_path = target.base_path + "/v1/score_batch";

  // Results are written into per-request slots so completion order is irrelevant.
  std::vector<std::optional<PairPrediction>> done(requests.size());
  std::vector<std::string> errors(requests.size());

  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  const std::size_t chunk = cfg.batch_size;
  for (std::size_t b = 0; b < requests.size(); b += chunk) {
    chunks.emplace_back(b, std::min(requests.size(), b + chunk));
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> batch_available{cfg.batch_size > 1};

  auto score_single = [&](httplib::Client& cli, std::size_t k) {
    auto r = post_once_with_retries(cli, single_path, requests[k].body().dump(), cfg.retries);
    if (auto* f = std::get_if<HttpFailure>(&r)) {
      errors[k] = f->reason;
      return;
    }
    try {
      done[k] = parse_score_response(requests[k].pair, std::get<json>(r));
    } catch (const Error& e) {
      errors[k] = std::string("non-conforming response: ") + e.what();
    }
  };

  auto try_batch = [&](httplib::Client& cli, std::size_t b, std::size_t e) {
    json pairs = json::array();
    for (std::size_t k = b; k < e; ++k) pairs.push_back(requests[k].body());
    auto r = post_once_with_retries(cli, batch_path, json{{"pairs", pairs}}.dump(), cfg.retries);
    if (auto* f = std::get_if<HttpFailure>(&r)) {
      if (f->status == 404 || f->status == 405) {
        if (batch_available.exchange(false)) {
          spdlog::info("batch endpoint unavailable ({}); scoring pairs individually", f->status);
        }
      }
      return;
    }
    const json& body = std::get<json>(r);
    auto results = body.is_object() ? body.find("results") : body.end();
    if (results == body.end() || !results->is_array() || results->size() != e - b) return;
    for (std::size_t k = b; k < e; ++k) {
      try {
        done[k] = parse_score_response(requests[k].pair, (*results)[k - b]);
      } catch (const Error&) {
        // left for the per-pair fallback
      }
    }
  };

  auto worker = [&] {
    httplib::Client cli(target.origin);
    apply_timeouts(cli, cfg.timeout_seconds);
    for (std::size_t c = next++; c < chunks.size(); c = next++) {
      const auto [b, e] = chunks[c];
      if (batch_available.load() && e - b > 1) try_batch(cli, b, e);
      for (std::size_t k = b; k < e; ++k) {
        if (!done[k]) score_single(cli, k);
      }
    }
  };

  const std::size_t n_workers = std::min(cfg.max_in_flight, std::max<std::size_t>(chunks.size(), 1));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  HttpScoreResult result;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    if (done[k]) {
      result.predictions.push_back(std::move(*done[k]));
    } else {
      result.failures.push_back({requests[k].pair, errors[k]});
    }
  }
  return result;
}

}  // namespace kpa
