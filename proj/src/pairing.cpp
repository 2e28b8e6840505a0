#include "kpa/pairing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/jsonl.hpp"
#include "kpa/random.hpp"
#include "kpa/text.hpp"

namespace kpa {

ArgumentPair ArgumentPair::normalized(GroupKey group, std::string a, std::string b) {
  if (a == b) throw Error(ErrorKind::Precondition, "pair of identical argument \"" + a + "\"");
  if (b < a) std::swap(a, b);
  return {std::move(group), std::move(a), std::move(b)};
}

std::string to_string(const ArgumentPair& p) {
  return to_string(p.group) + " (" + p.i + ", " + p.j + ")";
}

std::vector<ArgumentPair> enumerate_pairs(const TopicStanceGroup& group) {
  std::vector<ArgumentPair> pairs;
  const auto& args = group.arguments;
  if (args.size() > 1) pairs.reserve(args.size() * (args.size() - 1) / 2);
  for (std::size_t a = 0; a < args.size(); ++a) {
    for (std::size_t b = a + 1; b < args.size(); ++b) {
      pairs.push_back({group.key, args[a].arg_id, args[b].arg_id});
    }
  }
  return pairs;
}

std::vector<PairLabel> label_pairs(const std::vector<ArgumentPair>& pairs,
                                   const TopicStanceGroup& group,
                                   std::size_t max_intra_per_arg, std::uint64_t seed) {
  if (group.labels.empty()) {
    throw Error(ErrorKind::Precondition, "group " + to_string(group.key) + " has no gold labels");
  }
  std::vector<PairLabel> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.group != group.key || !group.find_argument(p.i) || !group.find_argument(p.j)) {
      throw Error(ErrorKind::Reference, "pair " + to_string(p) + " is outside group " +
                                            to_string(group.key));
    }
    PairLabel l{p, false, group.shared_key_point(p.i, p.j)};
    l.intra_cluster = l.shared_kp_text.has_value();
    labels.push_back(std::move(l));
  }
  if (max_intra_per_arg == kUnlimited) return labels;

  std::vector<char> keep(labels.size(), 1);
  std::map<std::string, std::vector<std::size_t>> occurrences;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!labels[k].intra_cluster) continue;
    occurrences[labels[k].pair.i].push_back(k);
    occurrences[labels[k].pair.j].push_back(k);
  }
  Rng rng(splitmix64(seed));
  for (auto& [arg_id, idx] : occurrences) {
    std::vector<std::size_t> live;
    for (std::size_t k : idx) {
      if (keep[k]) live.push_back(k);
    }
    if (live.size() <= max_intra_per_arg) continue;
    // Partial Fisher-Yates: the first max_intra_per_arg slots are kept.
    for (std::size_t s = 0; s < max_intra_per_arg; ++s) {
      std::swap(live[s], live[s + uniform_index(rng, live.size() - s)]);
    }
    for (std::size_t s = max_intra_per_arg; s < live.size(); ++s) keep[live[s]] = 0;
  }
  std::vector<PairLabel> out;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (keep[k]) out.push_back(std::move(labels[k]));
  }
  return out;
}

const char* stance_word(Stance s) { return s == Stance::Pro ? "positive" : "negative"; }

std::string format_input(std::string_view topic, Stance stance_i, std::string_view arg_i,
                         Stance stance_j, std::string_view arg_j) {
  std::string out;
  out.reserve(topic.size() + arg_i.size() + arg_j.size() + 32);
  out.append(topic).append(" | ").append(stance_word(stance_i)).append(". ").append(arg_i);
  out.append(" | ").append(stance_word(stance_j)).append(". ").append(arg_j);
  return out;
}

std::string format_output(const PairLabel& label) {
  if (!label.intra_cluster) return "No.";
  if (!label.shared_kp_text || trim(*label.shared_kp_text).empty()) {
    throw Error(ErrorKind::Precondition,
                "intra-cluster label for " + to_string(label.pair) + " has no key point text");
  }
  return "Yes. " + *label.shared_kp_text;
}

ParsedOutput parse_output(std::string_view text) {
  const std::string t = trim(text);
  std::size_t n = 0;
  while (n < t.size() && std::isalpha(static_cast<unsigned char>(t[n]))) ++n;
  const std::string word = ascii_lower(std::string_view(t).substr(0, n));
  if (word == "no") return {false, std::nullopt};
  if (word != "yes") {
    throw Error(ErrorKind::Unparseable, "unparseable model output: \"" + t + "\"");
  }
  std::string_view rest = std::string_view(t).substr(n);
  if (!rest.empty() && (rest[0] == '.' || rest[0] == ',' || rest[0] == ':')) rest.remove_prefix(1);
  std::string kp = trim(rest);
  if (kp.empty()) return {true, std::nullopt};
  return {true, std::move(kp)};
}

double share_score(LogitPair logits) {
  if (!std::isfinite(logits.logit_yes) || !std::isfinite(logits.logit_no)) {
    throw Error(ErrorKind::Range, "share_score requires finite logits");
  }
  const double m = std::max(logits.logit_yes, logits.logit_no);
  const double ey = std::exp(logits.logit_yes - m);
  const double en = std::exp(logits.logit_no - m);
  return ey / (ey + en);
}

PairPrediction prediction_from_generation(const ArgumentPair& pair, LogitPair logits, std::string_view output,
                                          UnparseablePolicy policy) {
  PairPrediction p{pair, share_score(logits), std::nullopt};
  try {
    const auto parsed = parse_output(output);
    if (parsed.is_yes && !parsed.key_point) spdlog::info("{}: Yes without key point, no edge", to_string(pair));
    p.key_point = parsed.key_point;
  } catch (const Error& e) {
    if (policy == UnparseablePolicy::Fail) throw Error(e.kind(), to_string(pair) + ": " + e.what());
    spdlog::warn("{}: {}; treated as No", to_string(pair), e.what());
  }
  return p;
}

std::vector<TrainingRecord> build_training_records(const Dataset& d, std::size_t max_intra_per_arg,
                                                   std::uint64_t seed) {
  std::vector<TrainingRecord> records;
  for (const auto& g : d.groups) {
    if (g.labels.empty()) continue;
    const std::uint64_t group_seed =
        substream(seed, "pair-sampling:" + g.key.topic + ":" + to_string(g.key.stance))();
    for (const auto& l : label_pairs(enumerate_pairs(g), g, max_intra_per_arg, group_seed)) {
      const Argument* ai = g.find_argument(l.pair.i);
      const Argument* aj = g.find_argument(l.pair.j);
      records.push_back({l.pair.i + "|" + l.pair.j,
                         format_input(g.key.topic, ai->stance, ai->text, aj->stance, aj->text),
                         format_output(l)});
    }
  }
  return records;
}

void write_training_records(const std::vector<TrainingRecord>& records,
                            const std::filesystem::path& path) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({{"pair_id", r.pair_id}, {"input", r.input}, {"output", r.output}});
  }
  write_text_file(path, to_jsonl(rows));
}

}  // namespace kpa
