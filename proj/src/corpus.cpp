#include "kpa/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/jsonl.hpp"
#include "kpa/text.hpp"

namespace kpa {

const char* to_string(Stance s) { return s == Stance::Pro ? "pro" : "con"; }

std::optional<Stance> parse_stance(std::string_view token, bool* alias_used) {
  const std::string t = ascii_lower(trim(token));
  if (alias_used) *alias_used = false;
  if (t == "pro") return Stance::Pro;
  if (t == "con") return Stance::Con;
  static const std::set<std::string, std::less<>> pro_aliases = {"positive", "support", "for", "1", "+1"};
  static const std::set<std::string, std::less<>> con_aliases = {"negative", "oppose", "against", "-1"};
  if (alias_used) *alias_used = true;
  if (pro_aliases.count(t)) return Stance::Pro;
  if (con_aliases.count(t)) return Stance::Con;
  return std::nullopt;
}

std::string to_string(const GroupKey& key) {
  return "(" + key.topic + ", " + to_string(key.stance) + ")";
}

const Argument* TopicStanceGroup::find_argument(std::string_view arg_id) const {
  auto it = std::lower_bound(arguments.begin(), arguments.end(), arg_id,
                             [](const Argument& a, std::string_view id) { return a.arg_id < id; });
  return it != arguments.end() && it->arg_id == arg_id ? &*it : nullptr;
}

const KeyPoint* TopicStanceGroup::find_key_point(std::string_view kp_id) const {
  auto it = std::lower_bound(reference_kps.begin(), reference_kps.end(), kp_id,
                             [](const KeyPoint& k, std::string_view id) { return k.kp_id < id; });
  return it != reference_kps.end() && it->kp_id == kp_id ? &*it : nullptr;
}

std::vector<std::string> TopicStanceGroup::gold_key_points(std::string_view arg_id) const {
  std::vector<std::string> out;
  auto it = std::lower_bound(labels.begin(), labels.end(), arg_id,
                             [](const MatchLabel& l, std::string_view id) { return l.arg_id < id; });
  for (; it != labels.end() && it->arg_id == arg_id; ++it) {
    if (it->label) out.push_back(it->kp_id);
  }
  return out;
}

std::optional<std::string> TopicStanceGroup::shared_key_point(std::string_view a,
                                                              std::string_view b) const {
  const auto ka = gold_key_points(a);
  const auto kb = gold_key_points(b);
  std::vector<std::string> common;
  std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(common));
  std::optional<std::string> best;
  for (const auto& kp_id : common) {
    const KeyPoint* kp = find_key_point(kp_id);
    if (kp && (!best || kp->text < *best)) best = kp->text;
  }
  return best;
}

const TopicStanceGroup* Dataset::find_group(const GroupKey& key) const {
  auto it = std::lower_bound(groups.begin(), groups.end(), key,
                             [](const TopicStanceGroup& g, const GroupKey& k) { return g.key < k; });
  return it != groups.end() && it->key == key ? &*it : nullptr;
}

std::size_t Dataset::argument_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.arguments.size();
  return n;
}

DataPaths DataPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "arguments.jsonl", dir / "keypoints.jsonl", dir / "labels.jsonl"};
}

namespace {

struct Loader {
  std::vector<std::string>* warnings;

  void warn(const std::string& msg) {
    spdlog::warn("{}", msg);
    if (warnings) warnings->push_back(msg);
  }

  void check_extra(const json& rec, const RecordLocation& at,
                   std::initializer_list<const char*> known) {
    for (const auto& f : unknown_fields(rec, known)) {
      warn(at.str() + ": ignoring unknown field \"" + f + "\"");
    }
  }

  Stance stance_of(const json& rec, const RecordLocation& at) {
    auto it = rec.find("stance");
    std::string token;
    if (it != rec.end() && it->is_string()) {
      token = it->get<std::string>();
    } else if (it != rec.end() && it->is_number_integer()) {
      token = std::to_string(it->get<long long>());
    } else {
      throw Error(ErrorKind::Parse, at.str() + ": field \"stance\" must be a string");
    }
    bool alias = false;
    auto s = parse_stance(token, &alias);
    if (!s) throw Error(ErrorKind::Parse, at.str() + ": unknown stance \"" + token + "\"");
    if (alias) warn(at.str() + ": stance \"" + token + "\" mapped to " + to_string(*s));
    return *s;
  }

  std::string text_of(const json& rec, const char* field, const RecordLocation& at) {
    std::string t = trim(require_string(rec, field, at));
    if (t.empty()) throw Error(ErrorKind::Parse, at.str() + ": field \"" + field + "\" is empty");
    return t;
  }
};

}  // namespace

Dataset load_dataset(const DataPaths& paths, std::vector<std::string>* warnings) {
  Loader loader{warnings};
  std::map<GroupKey, TopicStanceGroup> groups;
  std::unordered_map<std::string, GroupKey> arg_group;
  std::unordered_map<std::string, GroupKey> kp_group;

  auto group_for = [&](const GroupKey& key) -> TopicStanceGroup& {
    auto& g = groups[key];
    g.key = key;
    return g;
  };

  for_each_jsonl(paths.arguments, [&](const json& rec, const RecordLocation& at) {
    loader.check_extra(rec, at, {"arg_id", "topic", "stance", "text"});
    Argument a;
    a.arg_id = loader.text_of(rec, "arg_id", at);
    a.topic = loader.text_of(rec, "topic", at);
    a.stance = loader.stance_of(rec, at);
    a.text = loader.text_of(rec, "text", at);
    GroupKey key{a.topic, a.stance};
    if (!arg_group.emplace(a.arg_id, key).second) {
      throw Error(ErrorKind::Duplicate, at.str() + ": duplicate arg_id \"" + a.arg_id + "\"");
    }
    group_for(key).arguments.push_back(std::move(a));
  });

  for_each_jsonl(paths.key_points, [&](const json& rec, const RecordLocation& at) {
    loader.check_extra(rec, at, {"kp_id", "topic", "stance", "text"});
    KeyPoint k;
    k.kp_id = loader.text_of(rec, "kp_id", at);
    k.topic = loader.text_of(rec, "topic", at);
    k.stance = loader.stance_of(rec, at);
    k.text = loader.text_of(rec, "text", at);
    GroupKey key{k.topic, k.stance};
    if (!kp_group.emplace(k.kp_id, key).second) {
      throw Error(ErrorKind::Duplicate, at.str() + ": duplicate kp_id \"" + k.kp_id + "\"");
    }
    group_for(key).reference_kps.push_back(std::move(k));
  });

  Dataset d;
  std::set<std::pair<std::string, std::string>> seen_labels;
  for_each_jsonl(paths.labels, [&](const json& rec, const RecordLocation& at) {
    loader.check_extra(rec, at, {"arg_id", "kp_id", "label"});
    MatchLabel l;
    l.arg_id = require_string(rec, "arg_id", at);
    l.kp_id = require_string(rec, "kp_id", at);
    auto it = rec.find("label");
    if (it != rec.end() && it->is_boolean()) {
      l.label = it->get<bool>();
    } else if (it != rec.end() && it->is_number_integer() &&
               (it->get<long long>() == 0 || it->get<long long>() == 1)) {
      l.label = it->get<long long>() == 1;
    } else {
      throw Error(ErrorKind::Parse, at.str() + ": field \"label\" must be 0 or 1");
    }
    auto ga = arg_group.find(l.arg_id);
    if (ga == arg_group.end()) {
      throw Error(ErrorKind::Reference, at.str() + ": unknown arg_id \"" + l.arg_id + "\"");
    }
    auto gk = kp_group.find(l.kp_id);
    if (gk == kp_group.end()) {
      throw Error(ErrorKind::Reference, at.str() + ": unknown kp_id \"" + l.kp_id + "\"");
    }
    if (!seen_labels.emplace(l.arg_id, l.kp_id).second) {
      throw Error(ErrorKind::Duplicate,
                  at.str() + ": duplicate label (" + l.arg_id + ", " + l.kp_id + ")");
    }
    if (ga->second == gk->second) {
      groups[ga->second].labels.push_back(std::move(l));
    } else {
      d.cross_group_labels.push_back(std::move(l));
    }
  });

  auto by_label = [](const MatchLabel& a, const MatchLabel& b) {
    return std::tie(a.arg_id, a.kp_id) < std::tie(b.arg_id, b.kp_id);
  };
  d.groups.reserve(groups.size());
  for (auto& [key, g] : groups) {
    std::sort(g.arguments.begin(), g.arguments.end(),
              [](const Argument& a, const Argument& b) { return a.arg_id < b.arg_id; });
    std::sort(g.reference_kps.begin(), g.reference_kps.end(),
              [](const KeyPoint& a, const KeyPoint& b) { return a.kp_id < b.kp_id; });
    std::sort(g.labels.begin(), g.labels.end(), by_label);
    d.groups.push_back(std::move(g));
  }
  std::sort(d.cross_group_labels.begin(), d.cross_group_labels.end(), by_label);
  return d;
}

void save_dataset(const Dataset& d, const DataPaths& paths) {
  std::vector<json> args, kps, labels;
  for (const auto& g : d.groups) {
    for (const auto& a : g.arguments) {
      args.push_back({{"arg_id", a.arg_id}, {"topic", a.topic}, {"stance", to_string(a.stance)},
                      {"text", a.text}});
    }
    for (const auto& k : g.reference_kps) {
      kps.push_back({{"kp_id", k.kp_id}, {"topic", k.topic}, {"stance", to_string(k.stance)},
                     {"text", k.text}});
    }
    for (const auto& l : g.labels) {
      labels.push_back({{"arg_id", l.arg_id}, {"kp_id", l.kp_id}, {"label", l.label ? 1 : 0}});
    }
  }
  for (const auto& l : d.cross_group_labels) {
    labels.push_back({{"arg_id", l.arg_id}, {"kp_id", l.kp_id}, {"label", l.label ? 1 : 0}});
  }
  write_text_file(paths.arguments, to_jsonl(args));
  write_text_file(paths.key_points, to_jsonl(kps));
  write_text_file(paths.labels, to_jsonl(labels));
}

ValidationReport validate(const Dataset& d) {
  ValidationReport report;
  bool any_labels = !d.cross_group_labels.empty();
  for (const auto& g : d.groups) any_labels = any_labels || !g.labels.empty();

  for (const auto& g : d.groups) {
    std::set<std::string> matched_args, matched_kps;
    for (const auto& l : g.labels) {
      if (!l.label) continue;
      matched_args.insert(l.arg_id);
      matched_kps.insert(l.kp_id);
    }
    if (any_labels) {
      for (const auto& a : g.arguments) {
        if (!matched_args.count(a.arg_id)) {
          report.push_back({Severity::Warning, "argument-without-key-point",
                            "argument " + a.arg_id + " in " + to_string(g.key) +
                                " matches no key point"});
        }
      }
    }
    for (const auto& k : g.reference_kps) {
      if (!matched_kps.count(k.kp_id)) {
        report.push_back({Severity::Warning, "unreferenced-key-point",
                          "unreferenced key point " + k.kp_id + " in " + to_string(g.key)});
      }
    }
  }
  for (const auto& l : d.cross_group_labels) {
    report.push_back({Severity::Error, "cross-group-label",
                      "label (" + l.arg_id + ", " + l.kp_id +
                          ") links an argument and key point of different topic or stance"});
  }
  return report;
}

}  // namespace kpa
