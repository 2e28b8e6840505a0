#include "kpa/metrics.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/scorer.hpp"
#include "kpa/text.hpp"

namespace kpa {

namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& toks,
                                                             std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                      toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

Prf overlap_prf(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                std::size_t n) {
  const auto c = ngram_counts(cand, n);
  const auto r = ngram_counts(ref, n);
  std::size_t c_total = 0, r_total = 0, overlap = 0;
  for (const auto& [g, k] : c) c_total += k;
  for (const auto& [g, k] : r) r_total += k;
  if (c_total == 0 || r_total == 0) return {};
  for (const auto& [g, k] : c) {
    auto it = r.find(g);
    if (it != r.end()) overlap += std::min(k, it->second);
  }
  Prf out;
  out.precision = static_cast<double>(overlap) / static_cast<double>(c_total);
  out.recall = static_cast<double>(overlap) / static_cast<double>(r_total);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

}  // namespace

Prf rouge_n(std::string_view candidate, std::string_view reference, int n) {
  if (n != 1 && n != 2) throw Error(ErrorKind::Precondition, "rouge_n supports n = 1 or 2");
  return overlap_prf(tokenize(candidate), tokenize(reference), static_cast<std::size_t>(n));
}

double token_f1_sim(std::string_view a, std::string_view b) {
  const auto ta = tokenize(a);
  const auto tb = tokenize(b);
  if (ta.empty() && tb.empty()) return 1.0;
  return overlap_prf(ta, tb, 1).f1;
}

SimilarityFn token_f1_similarity() {
  return {"token-f1", [](const std::string& r, const std::string& g) { return token_f1_sim(r, g); }};
}

SimilarityFn exact_match_similarity() {
  return {"exact", [](const std::string& r, const std::string& g) { return trim(r) == trim(g) ? 1.0 : 0.0; }};
}

SimilarityFn http_similarity(const std::string& url, double timeout_seconds, std::size_t retries) {
  const HttpTarget target = HttpTarget::parse(url);
  return {"http:" + url, [target, timeout_seconds, retries](const std::string& r, const std::string& g) {
            const json body = post_json(target, "/v1/similarity", {{"reference", r}, {"generated", g}},
                                        timeout_seconds, retries);
            auto s = body.is_object() ? body.find("score") : body.end();
            if (s == body.end() || !s->is_number()) {
              throw Error(ErrorKind::Parse, "similarity response lacks numeric score");
            }
            const double v = s->get<double>();
            if (!(v >= 0.0 && v <= 1.0)) {
              throw Error(ErrorKind::Range, "similarity " + std::to_string(v) + " outside [0,1]");
            }
            return v;
          }};
}

SimilarityFn make_similarity(const std::string& spec) {
  if (spec == "token-f1") return token_f1_similarity();
  if (spec == "exact") return exact_match_similarity();
  if (spec.rfind("http:", 0) == 0 && spec.size() > 5) {
    // "http:http://host:port" or "http://host:port"
    std::string url = spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0 ? spec : spec.substr(5);
    return http_similarity(url);
  }
  throw Error(ErrorKind::Parse, "unknown similarity \"" + spec + "\"");
}

SoftPrf soft_prf(const std::vector<std::string>& generated, const std::vector<std::string>& reference,
                 const SimilarityFn& sim) {
  if (generated.empty() || reference.empty()) {
    throw Error(ErrorKind::Precondition, "soft_prf needs non-empty generated and reference lists");
  }
  // sim(reference, generated) for every pair, computed once.
  std::vector<std::vector<double>> m(generated.size(), std::vector<double>(reference.size()));
  for (std::size_t g = 0; g < generated.size(); ++g) {
    for (std::size_t r = 0; r < reference.size(); ++r) m[g][r] = sim.score(reference[r], generated[g]);
  }
  SoftPrf out;
  for (std::size_t g = 0; g < generated.size(); ++g) {
    out.sP += *std::max_element(m[g].begin(), m[g].end());
  }
  out.sP /= static_cast<double>(generated.size());
  for (std::size_t r = 0; r < reference.size(); ++r) {
    double best = m[0][r];
    for (std::size_t g = 1; g < generated.size(); ++g) best = std::max(best, m[g][r]);
    out.sR += best;
  }
  out.sR /= static_cast<double>(reference.size());
  out.sF1 = harmonic(out.sP, out.sR);
  return out;
}

EvalReport evaluate(const GeneratedKeyPoints& generated, const Dataset& dataset, const SimilarityFn& sim) {
  EvalReport report;
  report.sim_name = sim.name;
  for (const auto& [key, kps] : generated) {
    const TopicStanceGroup* g = dataset.find_group(key);
    if (!g) throw Error(ErrorKind::Reference, "unknown group " + to_string(key));
    if (g->reference_kps.empty()) {
      throw Error(ErrorKind::Precondition, "group " + to_string(key) + " has no reference key points");
    }
    std::vector<std::string> refs;
    for (const auto& k : g->reference_kps) refs.push_back(k.text);

    GroupScores gs;
    gs.group = key;
    gs.generated_count = kps.size();
    gs.reference_count = refs.size();
    if (kps.empty()) {
      gs.flags.push_back("no generated key points");
      spdlog::warn("{}: no generated key points; scored 0", to_string(key));
    } else {
      const std::string cand = join(kps, ". ");
      const std::string ref = join(refs, ". ");
      gs.rouge1 = rouge_n(cand, ref, 1).f1;
      gs.rouge2 = rouge_n(cand, ref, 2).f1;
      gs.soft = soft_prf(kps, refs, sim);
    }
    report.groups.push_back(std::move(gs));
  }
  if (!report.groups.empty()) {
    const double n = static_cast<double>(report.groups.size());
    for (const auto& gs : report.groups) {
      report.macro.rouge1 += gs.rouge1;
      report.macro.rouge2 += gs.rouge2;
      report.macro.sP += gs.soft.sP;
      report.macro.sR += gs.soft.sR;
      report.macro.sF1 += gs.soft.sF1;
    }
    report.macro.rouge1 /= n;
    report.macro.rouge2 /= n;
    report.macro.sP /= n;
    report.macro.sR /= n;
    report.macro.sF1 /= n;
  }
  return report;
}

json report_to_json(const EvalReport& report) {
  json groups = json::array();
  for (const auto& gs : report.groups) {
    groups.push_back({{"topic", gs.group.topic},
                      {"stance", to_string(gs.group.stance)},
                      {"rouge1", gs.rouge1},
                      {"rouge2", gs.rouge2},
                      {"sP", gs.soft.sP},
                      {"sR", gs.soft.sR},
                      {"sF1", gs.soft.sF1},
                      {"generated", gs.generated_count},
                      {"references", gs.reference_count},
                      {"flags", gs.flags}});
  }
  return {{"groups", std::move(groups)},
          {"macro",
           {{"rouge1", report.macro.rouge1},
            {"rouge2", report.macro.rouge2},
            {"sP", report.macro.sP},
            {"sR", report.macro.sR},
            {"sF1", report.macro.sF1}}},
          {"config", {{"sim", report.sim_name}}}};
}

}  // namespace kpa
