// kpa: key point analysis from pairwise shared-key-point predictions.
//
//   kpa pairs      export training pairs
//   kpa score      produce predictions.jsonl from a backend
//   kpa graph      build one argument graph per group
//   kpa partition  k-means + local search, key point selection
//   kpa eval       Rouge and soft P/R/F1 against reference key points
//   kpa pipeline   all of the above

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kpa/corpus.hpp"
#include "kpa/error.hpp"
#include "kpa/graph.hpp"
#include "kpa/metrics.hpp"
#include "kpa/pairing.hpp"
#include "kpa/partition.hpp"
#include "kpa/pipeline.hpp"
#include "kpa/random.hpp"
#include "kpa/scorer.hpp"

namespace fs = std::filesystem;
using namespace kpa;

namespace {

struct Options {
  std::string config_file;
  std::string log_level = "info";

  std::string data;
  std::string out;
  std::uint64_t seed = 42;

  // pairs
  std::size_t max_intra = 5;

  // score
  std::string backend = "oracle";
  std::string source;
  std::size_t max_in_flight = 8;
  double timeout = 30.0;
  std::size_t retries = 2;
  std::size_t batch_size = 16;

  // graph
  std::string predictions;
  double min_score = 0.0;

  // partition
  std::string graphs;
  std::string embeddings = kFallbackEmbeddings;
  std::string num_subgraphs = "auto";
  double threshold_h = 0.008;
  std::size_t max_steps = 200;
  std::size_t kmeans_max_iters = 100;
  std::size_t kmeans_restarts = 30;
  std::string kmeans_init = "k-means++";

  // eval
  std::string generated;
  std::string sim = "token-f1";
};

/// Options the user actually typed, looked up after parsing.
struct Given {
  CLI::App* app = nullptr;
  bool operator()(const std::string& name) const {
    auto* opt = app->get_option_no_throw(name);
    return opt && opt->count() > 0;
  }
};

std::optional<std::size_t> parse_num_subgraphs(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || n == 0) {
    throw Error(ErrorKind::Parse, "--num-subgraphs must be \"auto\" or a positive integer");
  }
  return static_cast<std::size_t>(n);
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("KPA_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, std::string("KPA_SEED is not an integer: ") + v);
  }
}

/// defaults < --config file < KPA_SEED < explicit flags.
PipelineConfig resolve_config(const Options& o, const Given& given) {
  PipelineConfig cfg;
  if (!o.config_file.empty()) cfg.merge_json(read_json_file(o.config_file));
  if (auto s = env_seed()) cfg.seed = *s;
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--data")) cfg.data_dir = o.data;
  if (given("--out")) cfg.output_dir = o.out;
  if (given("--backend")) cfg.scorer.backend = parse_backend(o.backend);
  if (given("--source")) cfg.scorer.source = o.source;
  if (given("--max-in-flight")) cfg.scorer.max_in_flight = o.max_in_flight;
  if (given("--timeout")) cfg.scorer.timeout_seconds = o.timeout;
  if (given("--retries")) cfg.scorer.retries = o.retries;
  if (given("--batch-size")) cfg.scorer.batch_size = o.batch_size;
  if (given("--min-score")) cfg.edge_rule.min_score = o.min_score;
  if (given("--embeddings")) cfg.embeddings = o.embeddings;
  if (given("--num-subgraphs")) cfg.num_subgraphs = parse_num_subgraphs(o.num_subgraphs);
  if (given("--threshold-h")) cfg.threshold_h = o.threshold_h;
  if (given("--max-steps")) cfg.max_steps = o.max_steps;
  if (given("--kmeans-max-iters")) cfg.kmeans.max_iters = o.kmeans_max_iters;
  if (given("--kmeans-restarts")) cfg.kmeans.restarts = o.kmeans_restarts;
  if (given("--kmeans-init")) cfg.kmeans.init = parse_kmeans_init(o.kmeans_init);
  if (given("--sim")) cfg.similarity = o.sim;
  return cfg;
}

void add_scorer_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--backend", o.backend, "file | http | oracle")
      ->check(CLI::IsMember({"file", "http", "oracle"}));
  cmd->add_option("--source", o.source, "predictions.jsonl (file) or base URL (http)");
  cmd->add_option("--max-in-flight", o.max_in_flight, "concurrent HTTP requests")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout", o.timeout, "HTTP timeout in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--retries", o.retries, "retries on transport failure");
  cmd->add_option("--batch-size", o.batch_size, "pairs per batch request (1 disables batching)")
      ->check(CLI::PositiveNumber);
}

void add_partition_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--embeddings", o.embeddings, "embeddings.jsonl or \"fallback\"");
  cmd->add_option("--num-subgraphs", o.num_subgraphs, "auto | N");
  cmd->add_option("--threshold-h", o.threshold_h, "soft retention threshold")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-steps", o.max_steps, "local search steps");
  cmd->add_option("--kmeans-max-iters", o.kmeans_max_iters, "Lloyd iterations");
  cmd->add_option("--kmeans-restarts", o.kmeans_restarts, "independent k-means runs")->check(CLI::PositiveNumber);
  cmd->add_option("--kmeans-init", o.kmeans_init, "k-means++ | uniform")
      ->check(CLI::IsMember({"k-means++", "uniform"}));
}

Dataset load_data(const PipelineConfig& cfg) {
  if (cfg.data_dir.empty()) throw Error(ErrorKind::Precondition, "--data is required");
  return load_dataset(DataPaths::in_directory(cfg.data_dir));
}

std::vector<fs::path> json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_pairs(const PipelineConfig& cfg, const Options& o) {
  const Dataset d = load_data(cfg);
  const auto records = build_training_records(d, o.max_intra, cfg.seed);
  write_training_records(records, cfg.output_dir);
  std::cout << "wrote " << records.size() << " pairs to " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_score(const PipelineConfig& cfg) {
  const Dataset d = load_data(cfg);
  const auto preds = score_dataset(d, cfg.scorer);
  write_predictions(preds, cfg.output_dir);
  std::cout << "wrote " << preds.size() << " predictions to " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_graph(const PipelineConfig& cfg, const Options& o) {
  const Dataset d = load_data(cfg);
  if (o.predictions.empty()) throw Error(ErrorKind::Precondition, "--predictions is required");
  const auto index = load_predictions(o.predictions);
  std::vector<PairPrediction> preds;
  for (const auto& [pair, p] : index) preds.push_back(p);
  const auto graphs = build_graphs(d, preds, cfg.edge_rule);
  for (const auto& g : graphs) write_graph(g, cfg.output_dir / (group_file_stem(g.group()) + ".json"));
  std::cout << "wrote " << graphs.size() << " graphs to " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_partition(const PipelineConfig& cfg, const Options& o) {
  if (o.graphs.empty()) throw Error(ErrorKind::Precondition, "--graphs is required");
  std::optional<Dataset> d;
  if (!cfg.num_subgraphs || cfg.embeddings == kFallbackEmbeddings) {
    if (cfg.data_dir.empty()) {
      throw Error(ErrorKind::Precondition, "--data is required for --num-subgraphs auto and fallback embeddings");
    }
    d = load_data(cfg);
  }
  EmbeddingTable emb;
  if (cfg.embeddings == kFallbackEmbeddings) {
    const auto seed = derive_seed(cfg.seed, "embedding");
    for (const auto& g : d->groups) {
      for (const auto& a : g.arguments) emb.add(a.arg_id, hashed_bow_embedding(a.text, seed));
    }
  } else {
    if (!fs::exists(cfg.embeddings)) throw StageError("partition", "embeddings not found: " + cfg.embeddings);
    emb = load_embeddings(cfg.embeddings);
  }
  std::size_t n = 0;
  for (const auto& file : json_files(o.graphs)) {
    const ArgumentGraph g = read_graph(file);
    if (g.vertex_count() == 0) continue;
    const auto s = resolve_num_subgraphs(cfg.num_subgraphs, d ? d->find_group(g.group()) : nullptr,
                                         g.vertex_count());
    const auto gp = partition_graph(g, emb, s, cfg.threshold_h, cfg.max_steps, cfg.kmeans, cfg.seed);
    write_partition(gp.refined, cfg.output_dir / file.filename());
    ++n;
  }
  std::cout << "wrote " << n << " partitions to " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_eval(const PipelineConfig& cfg, const Options& o) {
  const Dataset d = load_data(cfg);
  if (o.generated.empty()) throw Error(ErrorKind::Precondition, "--generated is required");
  std::vector<PartitionDocument> docs;
  for (const auto& file : json_files(o.generated)) docs.push_back(read_partition(file));
  const auto report = evaluate(collect_generated(docs), d, make_similarity(cfg.similarity));
  write_text_file(cfg.output_dir, dump_document(report_to_json(report)));
  const auto& m = report.macro;
  std::cout << "groups=" << report.groups.size() << " rouge1=" << m.rouge1 << " rouge2=" << m.rouge2
            << " sP=" << m.sP << " sR=" << m.sR << " sF1=" << m.sF1 << "\n";
  return 0;
}

int cmd_pipeline(const PipelineConfig& cfg) {
  const auto result = run_pipeline(cfg);
  std::cout << format_summary(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key point analysis via argument graphs and local-search partitioning"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_file, "JSON config file; flags override its fields");
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off");

  auto* pairs = app.add_subcommand("pairs", "export training pairs (pairs.jsonl)");
  pairs->add_option("--data", o.data, "directory with arguments/keypoints/labels.jsonl")->required();
  pairs->add_option("--out", o.out, "output pairs.jsonl")->required();
  pairs->add_option("--max-intra", o.max_intra, "max intra-cluster pairs per argument");
  pairs->add_option("--seed", o.seed, "random seed");

  auto* score = app.add_subcommand("score", "score every argument pair (predictions.jsonl)");
  score->add_option("--data", o.data, "dataset directory")->required();
  score->add_option("--out", o.out, "output predictions.jsonl")->required();
  add_scorer_options(score, o);

  auto* graph = app.add_subcommand("graph", "build argument graphs");
  graph->add_option("--data", o.data, "dataset directory")->required();
  graph->add_option("--predictions", o.predictions, "predictions.jsonl")->required();
  graph->add_option("--out", o.out, "output directory")->required();
  graph->add_option("--min-score", o.min_score, "minimum share score for an edge");

  auto* partition = app.add_subcommand("partition", "partition graphs and select key points");
  partition->add_option("--graphs", o.graphs, "directory of graph JSON files")->required();
  partition->add_option("--data", o.data, "dataset directory (auto sizing, fallback embeddings)");
  partition->add_option("--out", o.out, "output directory")->required();
  partition->add_option("--seed", o.seed, "random seed");
  add_partition_options(partition, o);

  auto* eval = app.add_subcommand("eval", "evaluate generated key points");
  eval->add_option("--generated", o.generated, "directory of partition JSON files")->required();
  eval->add_option("--data", o.data, "dataset directory")->required();
  eval->add_option("--sim", o.sim, "token-f1 | exact | http:<url>");
  eval->add_option("--out", o.out, "output report.json")->required();

  auto* pipeline = app.add_subcommand("pipeline", "run every stage end to end");
  pipeline->add_option("--data", o.data, "dataset directory");
  pipeline->add_option("--out", o.out, "output directory");
  pipeline->add_option("--seed", o.seed, "random seed");
  pipeline->add_option("--sim", o.sim, "token-f1 | exact | http:<url>");
  pipeline->add_option("--min-score", o.min_score, "minimum share score for an edge");
  add_scorer_options(pipeline, o);
  add_partition_options(pipeline, o);

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("kpa");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(o.log_level));

  CLI::App* cmd = app.get_subcommands().front();
  try {
    const PipelineConfig cfg = resolve_config(o, Given{cmd});
    if (cmd == pairs) return cmd_pairs(cfg, o);
    if (cmd == score) return cmd_score(cfg);
    if (cmd == graph) return cmd_graph(cfg, o);
    if (cmd == partition) return cmd_partition(cfg, o);
    if (cmd == eval) return cmd_eval(cfg, o);
    if (cfg.data_dir.empty()) throw Error(ErrorKind::Precondition, "--data is required (flag or config)");
    return cmd_pipeline(cfg);
  } catch (const StageError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.message() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error [" << cmd->get_name() << "]: " << e.what() << "\n";
    return 1;
  }
}
