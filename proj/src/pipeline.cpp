#include "kpa/pipeline.hpp"

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "kpa/error.hpp"
#include "kpa/random.hpp"
#include "kpa/text.hpp"

namespace kpa {

void PipelineConfig::merge_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
  try {
    if (doc.contains("data")) data_dir = doc["data"].get<std::string>();
    if (doc.contains("output")) output_dir = doc["output"].get<std::string>();
    if (doc.contains("seed")) seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("embeddings")) embeddings = doc["embeddings"].get<std::string>();
    if (doc.contains("similarity")) similarity = doc["similarity"].get<std::string>();
    if (doc.contains("min_edge_score")) edge_rule.min_score = doc["min_edge_score"].get<double>();
    if (doc.contains("scorer")) {
      const json& s = doc["scorer"];
      if (s.contains("backend")) scorer.backend = parse_backend(s["backend"].get<std::string>());
      if (s.contains("source")) scorer.source = s["source"].get<std::string>();
      if (s.contains("timeout")) scorer.timeout_seconds = s["timeout"].get<double>();
      if (s.contains("max_in_flight")) scorer.max_in_flight = s["max_in_flight"].get<std::size_t>();
      if (s.contains("retries")) scorer.retries = s["retries"].get<std::size_t>();
      if (s.contains("batch_size")) scorer.batch_size = s["batch_size"].get<std::size_t>();
    }
    if (doc.contains("partition")) {
      const json& p = doc["partition"];
      if (p.contains("num_subgraphs")) {
        const json& n = p["num_subgraphs"];
        if (n.is_string() && n.get<std::string>() == "auto") {
          num_subgraphs.reset();
        } else {
          num_subgraphs = n.get<std::size_t>();
        }
      }
      if (p.contains("threshold_h")) threshold_h = p["threshold_h"].get<double>();
      if (p.contains("max_steps")) max_steps = p["max_steps"].get<std::size_t>();
      if (p.contains("kmeans_max_iters")) kmeans.max_iters = p["kmeans_max_iters"].get<std::size_t>();
      if (p.contains("kmeans_restarts")) kmeans.restarts = p["kmeans_restarts"].get<std::size_t>();
      if (p.contains("kmeans_init")) kmeans.init = parse_kmeans_init(p["kmeans_init"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
  }
}

json PipelineConfig::to_json() const {
  return {{"data", data_dir.string()},
          {"output", output_dir.string()},
          {"seed", seed},
          {"embeddings", embeddings},
          {"similarity", similarity},
          {"min_edge_score", edge_rule.min_score},
          {"scorer",
           {{"backend", to_string(scorer.backend)},
            {"source", scorer.source},
            {"timeout", scorer.timeout_seconds},
            {"max_in_flight", scorer.max_in_flight},
            {"retries", scorer.retries},
            {"batch_size", scorer.batch_size}}},
          {"partition",
           {{"num_subgraphs", num_subgraphs ? json(*num_subgraphs) : json("auto")},
            {"threshold_h", threshold_h},
            {"max_steps", max_steps},
            {"kmeans_max_iters", kmeans.max_iters},
            {"kmeans_restarts", kmeans.restarts},
            {"kmeans_init", to_string(kmeans.init)}}}};
}

std::vector<PairPrediction> score_dataset(const Dataset& d, const ScorerConfig& cfg) {
  cfg.check();
  std::optional<PredictionIndex> index;
  if (cfg.backend == ScorerBackend::File) index = load_predictions(cfg.source);
  std::vector<PairPrediction> out;
  for (const auto& g : d.groups) {
    auto preds = score_group(cfg, g, enumerate_pairs(g), index ? &*index : nullptr);
    spdlog::info("scored {} pairs for {}", preds.size(), to_string(g.key));
    out.insert(out.end(), std::make_move_iterator(preds.begin()), std::make_move_iterator(preds.end()));
  }
  return out;
}

std::vector<ArgumentGraph> build_graphs(const Dataset& d, const std::vector<PairPrediction>& predictions,
                                        const EdgeRule& rule) {
  std::map<GroupKey, std::vector<PairPrediction>> by_group;
  for (const auto& p : predictions) {
    if (!d.find_group(p.pair.group)) {
      throw Error(ErrorKind::Reference, "prediction " + to_string(p.pair) + " names an unknown group");
    }
    by_group[p.pair.group].push_back(p);
  }
  std::vector<ArgumentGraph> graphs;
  for (const auto& g : d.groups) {
    if (g.arguments.empty()) continue;
    graphs.push_back(build_graph(g, by_group[g.key], rule));
  }
  return graphs;
}

std::size_t resolve_num_subgraphs(std::optional<std::size_t> requested, const TopicStanceGroup* group,
                                  std::size_t vertex_count) {
  std::size_t s = 0;
  if (requested) {
    s = *requested;
  } else {
    if (!group || group->reference_kps.empty()) {
      throw Error(ErrorKind::Precondition,
                  "cannot size subgraphs automatically for " +
                      (group ? to_string(group->key) : std::string("unknown group")) +
                      ": no reference key points; pass an explicit count");
    }
    s = group->reference_kps.size();
  }
  if (s < 1) throw Error(ErrorKind::Precondition, "number of subgraphs must be >= 1");
  if (s > vertex_count) {
    spdlog::warn("{} subgraphs requested but only {} arguments; using {}", s, vertex_count, vertex_count);
    s = vertex_count;
  }
  return s;
}

GroupPartition partition_graph(const ArgumentGraph& g, const EmbeddingTable& emb, std::size_t s,
                               double threshold_h, std::size_t max_steps, const KMeansOptions& kmeans,
                               std::uint64_t seed) {
  const std::string tag = g.group().topic + ":" + to_string(g.group().stance);
  PartitionConfig cfg;
  cfg.num_subgraphs = s;
  cfg.threshold_h = threshold_h;
  cfg.max_steps = max_steps;
  cfg.kmeans = kmeans;
  cfg.seed = derive_seed(seed, "local-search:" + tag);
  cfg.check(g.vertex_count());

  GroupPartition out;
  Partition init = kmeans_init(emb, g.vertices(), s, derive_seed(seed, "kmeans:" + tag), kmeans);
  out.initial = {g.group(), init, select_key_points(g, init)};
  Partition refined = local_search(g, init, cfg);
  out.refined = {g.group(), refined, select_key_points(g, refined)};
  return out;
}

GeneratedKeyPoints collect_generated(const std::vector<PartitionDocument>& docs) {
  GeneratedKeyPoints out;
  for (const auto& d : docs) {
    auto& list = out[d.group];
    for (const auto& r : d.key_points) {
      if (r.key_point) list.push_back(*r.key_point);
    }
  }
  return out;
}

std::string group_file_stem(const GroupKey& key) {
  std::string slug;
  for (char c : ascii_lower(key.topic)) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (keep) {
      slug.push_back(c);
    } else if (!slug.empty() && slug.back() != '_') {
      slug.push_back('_');
    }
    if (slug.size() >= 48) break;
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  if (slug.empty()) slug = "topic";
  return fmt::format("{}_{}_{:08x}", slug, to_string(key.stance),
                     static_cast<std::uint32_t>(fnv1a(key.topic) & 0xffffffffu));
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  const auto& out_dir = cfg.output_dir;
  PipelineResult result;

  const Dataset dataset = stage("load", [&] {
    auto d = load_dataset(DataPaths::in_directory(cfg.data_dir));
    for (const auto& f : validate(d)) {
      if (f.severity == Severity::Error) {
        spdlog::error("{}", f.message);
      } else {
        spdlog::debug("{}", f.message);
      }
    }
    spdlog::info("loaded {} groups, {} arguments", d.groups.size(), d.argument_count());
    return d;
  });

  const auto predictions = stage("score", [&] {
    auto preds = score_dataset(dataset, cfg.scorer);
    write_predictions(preds, out_dir / "predictions.jsonl");
    return preds;
  });

  result.graphs = stage("graph", [&] {
    auto graphs = build_graphs(dataset, predictions, cfg.edge_rule);
    for (const auto& g : graphs) write_graph(g, out_dir / "graphs" / (group_file_stem(g.group()) + ".json"));
    return graphs;
  });

  result.partitions = stage("partition", [&] {
    EmbeddingTable emb;
    if (cfg.embeddings == kFallbackEmbeddings) {
      const std::uint64_t emb_seed = derive_seed(cfg.seed, "embedding");
      for (const auto& g : dataset.groups) {
        for (const auto& a : g.arguments) emb.add(a.arg_id, hashed_bow_embedding(a.text, emb_seed));
      }
    } else {
      if (!std::filesystem::exists(cfg.embeddings)) {
        throw StageError("partition", "embeddings not found: " + cfg.embeddings);
      }
      emb = load_embeddings(cfg.embeddings);
    }
    std::vector<GroupPartition> parts;
    for (const auto& g : result.graphs) {
      const auto s = resolve_num_subgraphs(cfg.num_subgraphs, dataset.find_group(g.group()), g.vertex_count());
      auto gp = partition_graph(g, emb, s, cfg.threshold_h, cfg.max_steps, cfg.kmeans, cfg.seed);
      const std::string stem = group_file_stem(g.group()) + ".json";
      write_partition(gp.initial, out_dir / "partitions_init" / stem);
      write_partition(gp.refined, out_dir / "partitions" / stem);
      parts.push_back(std::move(gp));
    }
    return parts;
  });

  result.report = stage("eval", [&]() -> std::optional<EvalReport> {
    std::vector<PartitionDocument> docs;
    for (const auto& gp : result.partitions) docs.push_back(gp.refined);
    GeneratedKeyPoints generated = collect_generated(docs);
    for (const auto& g : dataset.groups) {
      if (g.arguments.empty() && !g.reference_kps.empty()) generated[g.key];
    }
    for (auto it = generated.begin(); it != generated.end();) {
      const auto* g = dataset.find_group(it->first);
      if (g && g->reference_kps.empty()) {
        spdlog::warn("{}: no reference key points; not evaluated", to_string(it->first));
        it = generated.erase(it);
      } else {
        ++it;
      }
    }
    if (generated.empty()) return std::nullopt;
    auto report = evaluate(generated, dataset, make_similarity(cfg.similarity));
    write_text_file(out_dir / "report.json", dump_document(report_to_json(report)));
    return report;
  });

  write_text_file(out_dir / "config.json", dump_document(cfg.to_json()));
  return result;
}

std::string format_summary(const PipelineResult& result) {
  std::string out = fmt::format("{:<40} {:>5} {:>6} {:>4} {:>6} {:>8} {:>8} {:>8}\n", "group", "args",
                                "edges", "s", "moves", "rouge1", "sF1", "kps");
  std::map<GroupKey, const GroupScores*> scores;
  if (result.report) {
    for (const auto& gs : result.report->groups) scores[gs.group] = &gs;
  }
  for (std::size_t k = 0; k < result.graphs.size(); ++k) {
    const auto& g = result.graphs[k];
    const auto& doc = result.partitions[k].refined;
    std::string name = g.group().topic.substr(0, 32) + " (" + to_string(g.group().stance) + ")";
    std::size_t with_kp = 0;
    for (const auto& r : doc.key_points) with_kp += r.key_point ? 1 : 0;
    auto it = scores.find(g.group());
    out += fmt::format("{:<40} {:>5} {:>6} {:>4} {:>6} {:>8} {:>8} {:>8}\n", name, g.vertex_count(),
                       g.edges().size(), doc.partition.subgraphs.size(), doc.partition.moves.size(),
                       it != scores.end() ? fmt::format("{:.4f}", it->second->rouge1) : "-",
                       it != scores.end() ? fmt::format("{:.4f}", it->second->soft.sF1) : "-", with_kp);
  }
  if (result.report) {
    const auto& m = result.report->macro;
    out += fmt::format("macro: rouge1={:.4f} rouge2={:.4f} sP={:.4f} sR={:.4f} sF1={:.4f} (sim={})\n", m.rouge1,
                       m.rouge2, m.sP, m.sR, m.sF1, result.report->sim_name);
  }
  return out;
}

}  // namespace kpa
