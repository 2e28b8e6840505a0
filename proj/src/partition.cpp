#include "kpa/partition.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/random.hpp"

namespace kpa {

KMeansInit parse_kmeans_init(std::string_view name) {
  if (name == "k-means++") return KMeansInit::PlusPlus;
  if (name == "uniform") return KMeansInit::Uniform;
  throw Error(ErrorKind::Parse, "unknown k-means init \"" + std::string(name) + "\"");
}

const char* to_string(KMeansInit init) { return init == KMeansInit::PlusPlus ? "k-means++" : "uniform"; }

void PartitionConfig::check(std::size_t vertex_count) const {
  if (num_subgraphs < 1 || num_subgraphs > vertex_count) {
    throw Error(ErrorKind::Precondition, "num_subgraphs " + std::to_string(num_subgraphs) +
                                             " must be in [1, " + std::to_string(vertex_count) + "]");
  }
  if (!(threshold_h >= 0.0)) throw Error(ErrorKind::Precondition, "threshold h must be >= 0");
  if (kmeans.restarts < 1) throw Error(ErrorKind::Precondition, "k-means restarts must be >= 1");
}

// ---- PartitionState ------------------------------------------------------

PartitionState::PartitionState(const ArgumentGraph& g, const Partition& p) : g_(&g) {
  const std::size_t n = g.vertex_count();
  const std::size_t k = p.subgraphs.size();
  in_.assign(k, std::vector<char>(n, 0));
  members_.resize(k);
  sum_.assign(k, 0.0);
  count_.assign(k, 0);
  for (std::size_t s = 0; s < k; ++s) {
    for (const auto& id : p.subgraphs[s]) {
      const std::size_t v = g.require_index(id);
      in_[s][v] = 1;
      members_[s].push_back(v);
    }
    std::sort(members_[s].begin(), members_[s].end());
    recompute(s);
  }
}

PartitionState::Links PartitionState::links(std::size_t sub, std::size_t v) const {
  Links l;
  for (const auto& nb : g_->neighbors(v)) {
    if (in_[sub][nb.vertex]) {
      l.sum += nb.weight;
      ++l.count;
    }
  }
  return l;
}

void PartitionState::recompute(std::size_t sub) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t v : members_[sub]) {
    for (const auto& nb : g_->neighbors(v)) {
      if (nb.vertex > v && in_[sub][nb.vertex]) {
        sum += nb.weight;
        ++count;
      }
    }
  }
  sum_[sub] = sum;
  count_[sub] = count;
}

double PartitionState::weight(std::size_t sub) const {
  return count_[sub] == 0 ? 0.0 : sum_[sub] / static_cast<double>(count_[sub]);
}

double PartitionState::weight_without(std::size_t sub, std::size_t v) const {
  if (!in_[sub][v]) return weight(sub);
  const Links l = links(sub, v);
  const std::size_t c = count_[sub] - l.count;
  return c == 0 ? 0.0 : (sum_[sub] - l.sum) / static_cast<double>(c);
}

double PartitionState::weight_with(std::size_t sub, std::size_t v) const {
  if (in_[sub][v]) return weight(sub);
  const Links l = links(sub, v);
  const std::size_t c = count_[sub] + l.count;
  return c == 0 ? 0.0 : (sum_[sub] + l.sum) / static_cast<double>(c);
}

double PartitionState::move_cost(std::size_t v, std::size_t out, std::size_t in) const {
  return weight_without(out, v) - weight(out) + weight_with(in, v) - weight(in);
}

std::optional<std::pair<std::size_t, double>> PartitionState::best_target(std::size_t v,
                                                                          std::size_t out) const {
  std::optional<std::pair<std::size_t, double>> best;
  for (std::size_t s = 0; s < members_.size(); ++s) {
    if (s == out || in_[s][v]) continue;
    const double c = move_cost(v, out, s);
    if (!best || c > best->second) best = {s, c};
  }
  return best;
}

void PartitionState::insert(std::size_t sub, std::size_t v) {
  if (in_[sub][v]) return;
  in_[sub][v] = 1;
  auto& m = members_[sub];
  m.insert(std::lower_bound(m.begin(), m.end(), v), v);
  recompute(sub);
}

void PartitionState::erase(std::size_t sub, std::size_t v) {
  if (!in_[sub][v]) return;
  in_[sub][v] = 0;
  auto& m = members_[sub];
  m.erase(std::lower_bound(m.begin(), m.end(), v));
  recompute(sub);
}

Partition PartitionState::to_partition() const {
  Partition p;
  p.subgraphs.resize(members_.size());
  for (std::size_t s = 0; s < members_.size(); ++s) {
    for (std::size_t v : members_[s]) p.subgraphs[s].insert(g_->vertices()[v]);
  }
  return p;
}

// ---- set-level API -----------------------------------------------------------

namespace {

void check_move(const Partition& p, std::string_view v, std::size_t out_idx) {
  if (out_idx >= p.subgraphs.size()) {
    throw Error(ErrorKind::Precondition, "subgraph index " + std::to_string(out_idx) + " out of range");
  }
  if (!p.subgraphs[out_idx].count(std::string(v))) {
    throw Error(ErrorKind::Precondition, "vertex \"" + std::string(v) + "\" is not in subgraph " +
                                             std::to_string(out_idx));
  }
}

}  // namespace

double move_cost(const ArgumentGraph& g, const Partition& p, std::string_view v, std::size_t out_idx,
                 std::size_t in_idx) {
  check_move(p, v, out_idx);
  if (in_idx >= p.subgraphs.size() || in_idx == out_idx) {
    throw Error(ErrorKind::Precondition, "invalid target subgraph " + std::to_string(in_idx));
  }
  if (p.subgraphs[in_idx].count(std::string(v))) {
    throw Error(ErrorKind::Precondition, "vertex \"" + std::string(v) + "\" is already in subgraph " +
                                             std::to_string(in_idx));
  }
  PartitionState state(g, p);
  return state.move_cost(g.require_index(v), out_idx, in_idx);
}

std::pair<std::size_t, double> best_target(const ArgumentGraph& g, const Partition& p,
                                           std::string_view v, std::size_t out_idx) {
  check_move(p, v, out_idx);
  PartitionState state(g, p);
  auto best = state.best_target(g.require_index(v), out_idx);
  if (!best) {
    throw Error(ErrorKind::Precondition, "vertex \"" + std::string(v) + "\" is in every subgraph");
  }
  return *best;
}

// ---- local search ------------------------------------------------------------

std::optional<MoveRecord> try_move(PartitionState& state, const ArgumentGraph& g, std::size_t v,
                                   std::size_t out, double threshold_h, std::size_t step) {
  auto target = state.best_target(v, out);
  if (!target || !(target->second > 0.0)) return std::nullopt;

  MoveRecord rec;
  rec.step = step;
  rec.vertex = g.vertices()[v];
  rec.from = out;
  rec.to = target->first;
  rec.cost = target->second;
  rec.soft = state.weight(out) - state.weight_without(out, v) > threshold_h;
  rec.guard = !rec.soft && state.members(out).size() == 1;

  state.insert(rec.to, v);
  if (!rec.soft && !rec.guard) state.erase(out, v);
  return rec;
}

namespace {

bool any_positive_move(const PartitionState& state) {
  for (std::size_t s = 0; s < state.subgraph_count(); ++s) {
    for (std::size_t v : state.members(s)) {
      auto t = state.best_target(v, s);
      if (t && t->second > 0.0) return true;
    }
  }
  return false;
}

}  // namespace

Partition local_search(const ArgumentGraph& g, const Partition& init, const PartitionConfig& cfg) {
  cfg.check(g.vertex_count());
  if (init.subgraphs.size() != cfg.num_subgraphs) {
    throw Error(ErrorKind::Precondition, "initial partition has " + std::to_string(init.subgraphs.size()) +
                                             " subgraphs, config expects " +
                                             std::to_string(cfg.num_subgraphs));
  }
  VertexSet covered;
  for (const auto& s : init.subgraphs) covered.insert(s.begin(), s.end());
  if (covered.size() != g.vertex_count()) {
    throw Error(ErrorKind::Precondition, "initial partition does not cover every vertex");
  }

  PartitionState state(g, init);
  std::vector<MoveRecord> moves = init.moves;
  Rng rng(splitmix64(cfg.seed));
  const std::size_t patience = std::max<std::size_t>(g.vertex_count(), 1);
  std::size_t idle = 0;

  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    std::size_t occurrences = 0;
    for (std::size_t s = 0; s < state.subgraph_count(); ++s) occurrences += state.members(s).size();
    std::size_t pick = uniform_index(rng, occurrences);
    std::size_t out = 0;
    while (pick >= state.members(out).size()) pick -= state.members(out++).size();
    const std::size_t v = state.members(out)[pick];

    if (auto rec = try_move(state, g, v, out, cfg.threshold_h, step)) {
      spdlog::debug("step {}: {} {} -> {} cost {:.6f}{}", step, rec->vertex, rec->from, rec->to,
                    rec->cost, rec->soft ? " (soft)" : rec->guard ? " (guard)" : "");
      moves.push_back(std::move(*rec));
      idle = 0;
      continue;
    }
    if (++idle >= patience) {
      if (!any_positive_move(state)) {
        spdlog::debug("no positive move left after {} steps", step + 1);
        break;
      }
      idle = 0;
    }
  }

  Partition result = state.to_partition();
  result.moves = std::move(moves);
  return result;
}

// ---- key points --------------------------------------------------------------

std::vector<KeyPointResult> select_key_points(const ArgumentGraph& g, const Partition& p) {
  std::vector<KeyPointResult> out;
  const double n = static_cast<double>(g.vertex_count());
  for (std::size_t s = 0; s < p.subgraphs.size(); ++s) {
    KeyPointResult r;
    r.subgraph = s;
    r.members = p.subgraphs[s];
    r.prevalence = n > 0 ? static_cast<double>(r.members.size()) / n : 0.0;
    const auto edges = induced_edges(g, p.subgraphs[s]);
    const Edge* best = nullptr;
    for (const auto& e : edges) {
      if (!best || e.weight > best->weight ||
          (e.weight == best->weight && e.key_point < best->key_point)) {
        best = &e;
      }
    }
    if (best) {
      r.key_point = best->key_point;
      r.edge = SupportingEdge{best->u, best->v, best->weight};
    } else {
      r.diagnostic = "subgraph " + std::to_string(s) + " has no induced edge; no key point";
      spdlog::warn("{}: {}", to_string(g.group()), *r.diagnostic);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Prevalence> prevalence_report(const std::vector<KeyPointResult>& results,
                                          std::size_t group_size) {
  std::vector<Prevalence> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    out.push_back({r.key_point, group_size ? static_cast<double>(r.members.size()) /
                                                 static_cast<double>(group_size)
                                           : 0.0});
  }
  return out;
}

std::vector<Prevalence> prevalence_report(const std::vector<KeyPointResult>& results,
                                          const TopicStanceGroup& group) {
  return prevalence_report(results, group.arguments.size());
}

// ---- partition.json ----------------------------------------------------------

json partition_to_json(const PartitionDocument& doc) {
  json subgraphs = json::array();
  for (std::size_t s = 0; s < doc.partition.subgraphs.size(); ++s) {
    json entry{{"members", doc.partition.subgraphs[s]}};
    const KeyPointResult* r = s < doc.key_points.size() ? &doc.key_points[s] : nullptr;
    entry["key_point"] = r && r->key_point ? json(*r->key_point) : json(nullptr);
    entry["edge"] = r && r->edge ? json{{"u", r->edge->u}, {"v", r->edge->v}, {"weight", r->edge->weight}}
                                 : json(nullptr);
    entry["prevalence"] = r ? r->prevalence : 0.0;
    subgraphs.push_back(std::move(entry));
  }
  json moves = json::array();
  for (const auto& m : doc.partition.moves) {
    moves.push_back({{"step", m.step},
                     {"vertex", m.vertex},
                     {"from", m.from},
                     {"to", m.to},
                     {"cost", m.cost},
                     {"soft", m.soft},
                     {"guard", m.guard}});
  }
  return {{"topic", doc.group.topic},
          {"stance", to_string(doc.group.stance)},
          {"subgraphs", std::move(subgraphs)},
          {"moves", std::move(moves)}};
}

namespace {

PartitionDocument parse_partition(const json& doc, const std::string& origin) {
  const RecordLocation at{origin, 1};
  if (!doc.is_object()) throw Error(ErrorKind::Parse, origin + ": partition is not an object");
  PartitionDocument out;
  const std::string stance_token = require_string(doc, "stance", at);
  auto stance = parse_stance(stance_token);
  if (!stance) throw Error(ErrorKind::Parse, origin + ": unknown stance \"" + stance_token + "\"");
  out.group = {require_string(doc, "topic", at), *stance};

  auto subs = doc.find("subgraphs");
  if (subs == doc.end() || !subs->is_array()) {
    throw Error(ErrorKind::Parse, origin + ": missing \"subgraphs\" array");
  }
  for (std::size_t s = 0; s < subs->size(); ++s) {
    const json& e = (*subs)[s];
    KeyPointResult r;
    r.subgraph = s;
    auto members = e.find("members");
    if (members == e.end() || !members->is_array()) {
      throw Error(ErrorKind::Parse, origin + ": subgraph " + std::to_string(s) + " lacks members");
    }
    for (const auto& m : *members) r.members.insert(m.get<std::string>());
    r.key_point = optional_string(e, "key_point", at);
    auto edge = e.find("edge");
    if (edge != e.end() && !edge->is_null()) {
      r.edge = SupportingEdge{require_string(*edge, "u", at), require_string(*edge, "v", at),
                              require_number(*edge, "weight", at)};
    }
    r.prevalence = require_number(e, "prevalence", at);
    if (!r.key_point) r.diagnostic = "subgraph " + std::to_string(s) + " has no induced edge; no key point";
    out.partition.subgraphs.push_back(r.members);
    out.key_points.push_back(std::move(r));
  }
  auto moves = doc.find("moves");
  if (moves != doc.end() && moves->is_array()) {
    for (const auto& m : *moves) {
      MoveRecord rec;
      rec.step = m.at("step").get<std::size_t>();
      rec.vertex = m.at("vertex").get<std::string>();
      rec.from = m.at("from").get<std::size_t>();
      rec.to = m.at("to").get<std::size_t>();
      rec.cost = m.at("cost").get<double>();
      rec.soft = m.at("soft").get<bool>();
      rec.guard = m.value("guard", false);
      out.partition.moves.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

PartitionDocument partition_from_json(const json& doc, const std::string& origin) {
  try {
    return parse_partition(doc, origin);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, origin + ": " + e.what());
  }
}

void write_partition(const PartitionDocument& doc, const std::filesystem::path& path) {
  write_text_file(path, dump_document(partition_to_json(doc)));
}

PartitionDocument read_partition(const std::filesystem::path& path) {
  return partition_from_json(read_json_file(path), path.string());
}

}  // namespace kpa
