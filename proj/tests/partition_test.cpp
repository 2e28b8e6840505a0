#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kpa/error.hpp"
#include "kpa/partition.hpp"
#include "oracles.hpp"
#include "replay.hpp"

namespace kpa {
namespace {

using testing::make_graph;

ArgumentGraph move_example() {
  return make_graph({"a", "b", "c", "d"}, {{"a", "b", 0.1}, {"a", "c", 0.9}, {"a", "d", 0.9}, {"c", "d", 0.2}});
}

Partition hard(std::vector<VertexSet> sets) { return Partition{std::move(sets), {}}; }

TEST(MoveCost, HandExamples) {
  auto g = move_example();
  EXPECT_NEAR(move_cost(g, hard({{"a", "b"}, {"c", "d"}}), "a", 0, 1), 0.3667, 5e-5);
  EXPECT_NEAR(move_cost(g, hard({{"a", "b"}, {"c", "d"}}), "a", 0, 1), -0.1 + 2.0 / 3.0 - 0.2, 1e-12);

  auto g2 = make_graph({"a", "b", "c", "d"}, {{"a", "b", 0.9}, {"b", "c", 0.8}, {"b", "d", 0.2}, {"c", "d", 0.5}});
  EXPECT_NEAR(move_cost(g2, hard({{"a", "b"}, {"c", "d"}}), "b", 0, 1), -0.9, 1e-12);
}

TEST(MoveCost, IsolatedVertexCostsNothing) {
  auto g = make_graph({"a", "b", "v", "x"}, {{"a", "b", 0.7}});
  EXPECT_EQ(move_cost(g, hard({{"a", "b", "v"}, {"x"}}), "v", 0, 1), 0.0);
}

TEST(MoveCost, Preconditions) {
  auto g = move_example();
  auto p = hard({{"a", "b"}, {"c", "d"}});
  EXPECT_THROW(move_cost(g, p, "c", 0, 1), Error);
  EXPECT_THROW(move_cost(g, p, "a", 0, 0), Error);
  EXPECT_THROW(move_cost(g, hard({{"a", "b"}, {"a", "c", "d"}}), "a", 0, 1), Error);
  EXPECT_THROW(move_cost(g, p, "a", 0, 5), Error);
}

TEST(BestTarget, ArgmaxAndTies) {
  auto g = make_graph({"v", "x1", "x2"}, {{"v", "x1", 0.1}, {"v", "x2", 0.3}});
  auto t = best_target(g, hard({{"v"}, {"x1"}, {"x2"}}), "v", 0);
  EXPECT_EQ(t.first, 2u);
  EXPECT_NEAR(t.second, 0.3, 1e-12);

  auto tie = make_graph({"v", "x1", "x2"}, {{"v", "x1", 0.2}, {"v", "x2", 0.2}});
  EXPECT_EQ(best_target(tie, hard({{"v"}, {"x1"}, {"x2"}}), "v", 0).first, 1u);

  auto single = best_target(move_example(), hard({{"a", "b"}, {"c", "d"}}), "a", 0);
  EXPECT_EQ(single.first, 1u);

  EXPECT_THROW(best_target(move_example(), hard({{"a", "b"}, {"a", "c", "d"}}), "a", 0), Error);
}

TEST(TryMove, RetentionThreshold) {
  auto g = move_example();
  const auto a = g.require_index("a");
  {
    PartitionState st(g, hard({{"a", "b"}, {"c", "d"}}));
    auto rec = try_move(st, g, a, 0, 1.0, 0);
    ASSERT_TRUE(rec);
    EXPECT_FALSE(rec->soft);
    EXPECT_EQ(st.to_partition().subgraphs, (std::vector<VertexSet>{{"b"}, {"a", "c", "d"}}));
  }
  {
    PartitionState st(g, hard({{"a", "b"}, {"c", "d"}}));
    auto rec = try_move(st, g, a, 0, 0.05, 0);
    ASSERT_TRUE(rec);
    EXPECT_TRUE(rec->soft);
    EXPECT_EQ(st.to_partition().subgraphs, (std::vector<VertexSet>{{"a", "b"}, {"a", "c", "d"}}));
  }
}

TEST(TryMove, SingletonSourceIsNeverEmptied) {
  auto g = make_graph({"v", "x", "y"}, {{"v", "x", 0.9}, {"v", "y", 0.9}, {"x", "y", 0.5}});
  PartitionState st(g, hard({{"v"}, {"x", "y"}}));
  auto rec = try_move(st, g, g.require_index("v"), 0, 0.008, 0);
  ASSERT_TRUE(rec);
  EXPECT_TRUE(rec->guard);
  EXPECT_FALSE(rec->soft);
  EXPECT_EQ(st.to_partition().subgraphs, (std::vector<VertexSet>{{"v"}, {"v", "x", "y"}}));
}

TEST(TryMove, NonPositiveCostDoesNothing) {
  auto g = make_graph({"a", "b", "c", "d"}, {{"a", "b", 0.9}, {"b", "c", 0.8}, {"b", "d", 0.2}, {"c", "d", 0.5}});
  PartitionState st(g, hard({{"a", "b"}, {"c", "d"}}));
  EXPECT_FALSE(try_move(st, g, g.require_index("b"), 0, 0.0, 0));
  EXPECT_EQ(st.to_partition().subgraphs, (std::vector<VertexSet>{{"a", "b"}, {"c", "d"}}));
}

// The incremental state and the set-level functions must agree everywhere.
TEST(PartitionState, AgreesWithSetLevelCost) {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::random_graph(rng, 3 + uniform_index(rng, 8), 60);
    const std::size_t k = 2 + uniform_index(rng, 2);
    if (k > g.vertex_count()) continue;
    auto p = testing::random_partition(rng, g, k);
    PartitionState st(g, p);
    for (std::size_t s = 0; s < k; ++s) {
      EXPECT_NEAR(st.weight(s), subgraph_weight(g, p.subgraphs[s]), 1e-12);
      for (const auto& v : p.subgraphs[s]) {
        for (std::size_t t = 0; t < k; ++t) {
          if (t == s) continue;
          EXPECT_NEAR(st.move_cost(g.require_index(v), s, t), move_cost(g, p, v, s, t), 1e-12);
        }
      }
    }
  }
}

TEST(LocalSearch, ZeroStepsReturnsInit) {
  Rng rng(3);
  auto g = testing::random_graph(rng, 12, 50);
  auto init = testing::random_partition(rng, g, 3);
  PartitionConfig cfg;
  cfg.num_subgraphs = 3;
  cfg.max_steps = 0;
  EXPECT_EQ(local_search(g, init, cfg), init);
}

TEST(LocalSearch, NoPositiveMoveLeavesInitUnchanged) {
  auto g = make_graph({"a", "b", "c", "d", "e", "f"}, {{"a", "b", 1.0}, {"a", "c", 1.0}, {"b", "c", 1.0},
                                                       {"d", "e", 1.0}, {"d", "f", 1.0}, {"e", "f", 1.0}});
  auto init = hard({{"a", "b", "c"}, {"d", "e", "f"}});
  PartitionConfig cfg;
  cfg.num_subgraphs = 2;
  auto out = local_search(g, init, cfg);
  EXPECT_EQ(out, init);
}

TEST(LocalSearch, MovesReplayAgainstOracle) {
  Rng rng(11);
  std::size_t total_moves = 0, total_soft = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::random_graph(rng, 4 + uniform_index(rng, 20), 5 + uniform_index(rng, 60));
    const std::size_t k = 1 + uniform_index(rng, std::min<std::size_t>(5, g.vertex_count()));
    auto init = testing::random_partition(rng, g, k);
    PartitionConfig cfg;
    cfg.num_subgraphs = k;
    cfg.threshold_h = trial % 2 ? 0.008 : 0.2;
    cfg.seed = static_cast<std::uint64_t>(trial);
    auto out = local_search(g, init, cfg);
    auto r = testing::replay_moves(g, init, out, cfg.threshold_h);
    EXPECT_EQ(r.violation, "") << "trial " << trial;
    EXPECT_LT(r.max_cost_error, 1e-9);
    EXPECT_LT(r.max_sum_error, 1e-9);
    total_moves += r.moves;
    total_soft += r.soft;

    VertexSet all;
    for (const auto& s : out.subgraphs) {
      EXPECT_FALSE(s.empty());
      all.insert(s.begin(), s.end());
    }
    EXPECT_EQ(all.size(), g.vertex_count());
  }
  // Make sure the property was exercised.
  EXPECT_GT(total_moves, 40u);
  EXPECT_GT(total_soft, 0u);
}

TEST(LocalSearch, DeterministicAndSeedSensitive) {
  Rng rng(5);
  auto g = testing::random_graph(rng, 25, 40);
  auto init = testing::random_partition(rng, g, 4);
  PartitionConfig cfg;
  cfg.num_subgraphs = 4;
  cfg.seed = 1;
  auto a = local_search(g, init, cfg);
  EXPECT_EQ(a, local_search(g, init, cfg));
  cfg.seed = 2;
  EXPECT_NE(a.moves, local_search(g, init, cfg).moves);
}

TEST(LocalSearch, ConfigErrors) {
  auto g = move_example();
  PartitionConfig cfg;
  cfg.num_subgraphs = 2;
  EXPECT_THROW(local_search(g, hard({{"a", "b"}, {"c"}}), cfg), Error);
  EXPECT_THROW(local_search(g, hard({{"a", "b", "c", "d"}}), cfg), Error);
  cfg.num_subgraphs = 5;
  EXPECT_THROW(cfg.check(4), Error);
  cfg.num_subgraphs = 2;
  cfg.threshold_h = -1.0;
  EXPECT_THROW(cfg.check(4), Error);
}

TEST(SelectKeyPoints, HeaviestEdgeWins) {
  std::vector<Edge> edges{{"a", "b", 0.9, "X"}, {"b", "c", 0.8, "Y"}, {"e", "f", 0.8, "B"}, {"e", "g", 0.8, "A"}};
  ArgumentGraph g(testing::test_key(), {"a", "b", "c", "d", "e", "f", "g"}, edges);
  auto r = select_key_points(g, hard({{"a", "b", "c"}, {"d"}, {"e", "f", "g"}}));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].key_point, "X");
  EXPECT_EQ(r[0].edge, (SupportingEdge{"a", "b", 0.9}));
  EXPECT_FALSE(r[1].key_point);
  EXPECT_FALSE(r[1].edge);
  EXPECT_TRUE(r[1].diagnostic);
  EXPECT_EQ(r[2].key_point, "A");
  EXPECT_NEAR(r[0].prevalence, 3.0 / 7.0, 1e-15);
}

TEST(SelectKeyPoints, SameTextTieGoesToSmallestPair) {
  std::vector<Edge> edges{{"a", "c", 0.5, "K"}, {"a", "b", 0.5, "K"}};
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.v < y.v; });
  ArgumentGraph g(testing::test_key(), {"a", "b", "c"}, edges);
  EXPECT_EQ(select_key_points(g, hard({{"a", "b", "c"}}))[0].edge, (SupportingEdge{"a", "b", 0.5}));
}

TEST(Prevalence, Fractions) {
  std::vector<KeyPointResult> r(1);
  r[0].members = {"1", "2", "3", "4"};
  EXPECT_DOUBLE_EQ(prevalence_report(r, 10)[0].fraction, 0.4);
  std::vector<KeyPointResult> soft(2);
  soft[0].members = {"a", "b", "c"};
  soft[1].members = {"c", "d", "e"};
  auto rep = prevalence_report(soft, 5);
  EXPECT_DOUBLE_EQ(rep[0].fraction, 0.6);
  EXPECT_DOUBLE_EQ(rep[1].fraction, 0.6);
  EXPECT_TRUE(prevalence_report({}, 5).empty());
}

TEST(PartitionJson, RoundTripAndShape) {
  testing::TempDir dir;
  auto g = move_example();
  Partition p = hard({{"a", "b"}, {"c", "d"}});
  PartitionState st(g, p);
  auto rec = try_move(st, g, g.require_index("a"), 0, 0.05, 3);
  Partition q = st.to_partition();
  q.moves.push_back(*rec);
  PartitionDocument doc{g.group(), q, select_key_points(g, q)};
  write_partition(doc, dir / "p.json");
  EXPECT_EQ(read_partition(dir / "p.json"), doc);

  auto j = partition_to_json(doc);
  EXPECT_EQ(j["topic"], "T");
  EXPECT_EQ(j["subgraphs"][0]["members"], json({"a", "b"}));
  EXPECT_EQ(j["subgraphs"][0]["key_point"], "K");
  EXPECT_EQ(j["subgraphs"][0]["edge"]["weight"], 0.1);
  EXPECT_TRUE(j["subgraphs"][0].contains("prevalence"));
  const auto& m = j["moves"][0];
  for (const char* f : {"step", "vertex", "from", "to", "cost", "soft"}) EXPECT_TRUE(m.contains(f)) << f;
  EXPECT_EQ(m["soft"], true);
}

TEST(PartitionJson, MalformedDocument) {
  EXPECT_THROW(partition_from_json(json{{"topic", "T"}}), Error);
  EXPECT_THROW(partition_from_json(json::array()), Error);
}

}  // namespace
}  // namespace kpa
