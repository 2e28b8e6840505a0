#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kpa {

using json = nlohmann::json;

/// Location of a record, rendered as "path:line" in error messages.
struct RecordLocation {
  std::string file;
  std::size_t line = 0;

  std::string str() const { return file + ":" + std::to_string(line); }
};

/// Calls `fn` for each non-blank line parsed as a JSON object. Throws
/// Error(Io) when the file cannot be opened and Error(Parse) naming the line
/// on malformed JSON or a non-object record.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, const RecordLocation&)>& fn);

json read_json_file(const std::filesystem::path& path);

/// Writes `text` atomically enough for batch use: parent directories are
/// created, the file is truncated.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Serializes one record per line with a trailing newline.
std::string to_jsonl(const std::vector<json>& records);

/// Pretty JSON with a trailing newline; used for every single-document artifact.
std::string dump_document(const json& doc);

std::string require_string(const json& obj, const char* field, const RecordLocation& at);
double require_number(const json& obj, const char* field, const RecordLocation& at);
std::optional<std::string> optional_string(const json& obj, const char* field,
                                           const RecordLocation& at);

/// Names of fields in `obj` that are not in `known`.
std::vector<std::string> unknown_fields(const json& obj, std::initializer_list<const char*> known);

}  // namespace kpa
