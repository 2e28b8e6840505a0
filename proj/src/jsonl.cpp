#include "kpa/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "kpa/error.hpp"
#include "kpa/text.hpp"

namespace kpa {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, const RecordLocation&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  RecordLocation at{path.string(), 0};
  std::string line;
  while (std::getline(in, line)) {
    ++at.line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, at.str() + ": malformed JSON: " + e.what());
    }
    if (!record.is_object()) throw Error(ErrorKind::Parse, at.str() + ": record is not an object");
    fn(record, at);
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": malformed JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string to_jsonl(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

std::string require_string(const json& obj, const char* field, const RecordLocation& at) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorKind::Parse, at.str() + ": field \"" + field + "\" must be a string");
  }
  return it->get<std::string>();
}

double require_number(const json& obj, const char* field, const RecordLocation& at) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorKind::Parse, at.str() + ": field \"" + field + "\" must be a number");
  }
  return it->get<double>();
}

std::optional<std::string> optional_string(const json& obj, const char* field,
                                           const RecordLocation& at) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorKind::Parse, at.str() + ": field \"" + field + "\" must be a string or null");
  }
  return it->get<std::string>();
}

std::vector<std::string> unknown_fields(const json& obj, std::initializer_list<const char*> known) {
  std::vector<std::string> extra;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (!found) extra.push_back(it.key());
  }
  return extra;
}

}  // namespace kpa
