#include "kpa/embedding.hpp"

#include <cmath>

#include "kpa/error.hpp"
#include "kpa/jsonl.hpp"
#include "kpa/random.hpp"
#include "kpa/text.hpp"

namespace kpa {

void EmbeddingTable::check_covers(const std::vector<std::string>& ids) const {
  for (const auto& id : ids) {
    auto it = vectors.find(id);
    if (it == vectors.end()) {
      throw Error(ErrorKind::Reference, "no embedding for argument \"" + id + "\"");
    }
    if (it->second.size() != dim) {
      throw Error(ErrorKind::Precondition, "embedding of \"" + id + "\" has length " +
                                               std::to_string(it->second.size()) + ", expected " +
                                               std::to_string(dim));
    }
    for (double x : it->second) {
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::Precondition, "embedding of \"" + id + "\" is not finite");
      }
    }
  }
}

void EmbeddingTable::add(std::string arg_id, std::vector<double> vector) {
  if (vectors.empty()) dim = vector.size();
  if (vector.size() != dim) {
    throw Error(ErrorKind::Precondition, "embedding of \"" + arg_id + "\" has length " +
                                             std::to_string(vector.size()) + ", expected " +
                                             std::to_string(dim));
  }
  vectors[std::move(arg_id)] = std::move(vector);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  EmbeddingTable table;
  for_each_jsonl(path, [&](const json& rec, const RecordLocation& at) {
    std::string id = require_string(rec, "arg_id", at);
    auto v = rec.find("vector");
    if (v == rec.end() || !v->is_array() || v->empty()) {
      throw Error(ErrorKind::Parse, at.str() + ": field \"vector\" must be a non-empty array");
    }
    std::vector<double> vec;
    vec.reserve(v->size());
    for (const auto& x : *v) {
      if (!x.is_number()) throw Error(ErrorKind::Parse, at.str() + ": vector entries must be numbers");
      vec.push_back(x.get<double>());
    }
    if (table.vectors.count(id)) {
      throw Error(ErrorKind::Duplicate, at.str() + ": duplicate embedding for \"" + id + "\"");
    }
    try {
      table.add(std::move(id), std::move(vec));
    } catch (const Error& e) {
      throw Error(e.kind(), at.str() + ": " + e.what());
    }
  });
  return table;
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::vector<json> rows;
  for (const auto& [id, vec] : table.vectors) rows.push_back({{"arg_id", id}, {"vector", vec}});
  write_text_file(path, to_jsonl(rows));
}

std::vector<double> hashed_bow_embedding(std::string_view text, std::uint64_t seed, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  const std::uint64_t basis = splitmix64(seed);
  for (const auto& tok : tokenize(text)) {
    const std::uint64_t h = splitmix64(fnv1a(tok, basis));
    v[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

EmbeddingTable embed_arguments(const std::vector<Argument>& args, std::uint64_t seed, std::size_t dim) {
  EmbeddingTable t;
  t.dim = dim;
  for (const auto& a : args) t.vectors[a.arg_id] = hashed_bow_embedding(a.text, seed, dim);
  return t;
}

}  // namespace kpa
