#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kpa {

enum class Stance { Pro, Con };

/// "pro" / "con".
const char* to_string(Stance s);

/// Parses a dataset stance token. Besides "pro"/"con" a few common aliases
/// are accepted; `alias_used` is set when the token was not canonical.
std::optional<Stance> parse_stance(std::string_view token, bool* alias_used = nullptr);

/// Identity of a topic-stance group.
struct GroupKey {
  std::string topic;
  Stance stance = Stance::Pro;

  auto operator<=>(const GroupKey&) const = default;
  bool operator==(const GroupKey&) const = default;
};

std::string to_string(const GroupKey& key);

struct Argument {
  std::string arg_id;
  std::string topic;
  Stance stance = Stance::Pro;
  std::string text;

  bool operator==(const Argument&) const = default;
};

struct KeyPoint {
  std::string kp_id;
  std::string topic;
  Stance stance = Stance::Pro;
  std::string text;

  bool operator==(const KeyPoint&) const = default;
};

struct MatchLabel {
  std::string arg_id;
  std::string kp_id;
  bool label = false;

  bool operator==(const MatchLabel&) const = default;
};

/// All arguments, reference key points and labels sharing one (topic, stance).
/// Arguments are sorted by arg_id, key points by kp_id, labels by
/// (arg_id, kp_id).
class TopicStanceGroup {
 public:
  GroupKey key;
  std::vector<Argument> arguments;
  std::vector<KeyPoint> reference_kps;
  std::vector<MatchLabel> labels;

  const Argument* find_argument(std::string_view arg_id) const;
  const KeyPoint* find_key_point(std::string_view kp_id) const;

  /// kp_ids with a positive label for the argument, sorted.
  std::vector<std::string> gold_key_points(std::string_view arg_id) const;

  /// Text of the lexicographically smallest key point matched by both
  /// arguments, or nullopt if they share none.
  std::optional<std::string> shared_key_point(std::string_view a, std::string_view b) const;

  bool operator==(const TopicStanceGroup&) const = default;
};

struct Dataset {
  /// Sorted by key; keys unique.
  std::vector<TopicStanceGroup> groups;
  /// Labels whose argument and key point fall in different groups. Kept out
  /// of the groups so that group invariants hold; `validate` reports them.
  std::vector<MatchLabel> cross_group_labels;

  const TopicStanceGroup* find_group(const GroupKey& key) const;
  std::size_t argument_count() const;

  bool operator==(const Dataset&) const = default;
};

struct DataPaths {
  std::filesystem::path arguments;
  std::filesystem::path key_points;
  std::filesystem::path labels;

  /// arguments.jsonl / keypoints.jsonl / labels.jsonl inside `dir`.
  static DataPaths in_directory(const std::filesystem::path& dir);
};

/// Loads and groups the corpus. Non-fatal findings (ignored extra fields,
/// stance aliases) are appended to `warnings` when given and logged.
Dataset load_dataset(const DataPaths& paths, std::vector<std::string>* warnings = nullptr);

/// Writes the three JSONL files; reloading yields an equal Dataset.
void save_dataset(const Dataset& d, const DataPaths& paths);

enum class Severity { Warning, Error };

struct Finding {
  Severity severity = Severity::Warning;
  std::string code;
  std::string message;
};

using ValidationReport = std::vector<Finding>;

/// Diagnostic pass over a loaded dataset. Never throws.
ValidationReport validate(const Dataset& d);

}  // namespace kpa
