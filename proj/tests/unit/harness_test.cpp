#include <gtest/gtest.h>

#include <cmath>

#include "tklu/harness.hpp"

using namespace tklu;

TEST(Config, ParseOverridesAndRoundTrips) {
  const auto cfg = parse_config(
      "# experiment\n"
      "nodes = 9\n"
      "range=3..7; key-bits=16\n"
      "curve=toy19\n"
      "radio_range=0.75\n"
      "latency_preset=radio\n"
      "format=json\n"
      "victim=4\n");
  EXPECT_EQ(cfg.nodes, 9u);
  EXPECT_EQ(cfg.range_lo, 3u);
  EXPECT_EQ(cfg.range_hi, 7u);
  EXPECT_EQ(cfg.key_bits, 16u);
  EXPECT_EQ(cfg.curve, "toy19");
  EXPECT_DOUBLE_EQ(*cfg.radio_range, 0.75);
  EXPECT_EQ(cfg.latency, "radio");
  EXPECT_EQ(cfg.format, OutputFormat::Json);
  EXPECT_EQ(cfg.victim, NodeId{4});
  const auto again = parse_config(cfg.to_kv());
  EXPECT_EQ(again.to_kv(), cfg.to_kv());
}

TEST(Config, RangeForms) {
  ExperimentConfig c;
  set_config_value(c, "range", "4:6");
  EXPECT_EQ(c.range_lo, 4u);
  EXPECT_EQ(c.range_hi, 6u);
  set_config_value(c, "range", "5");
  EXPECT_EQ(c.range_lo, 5u);
  EXPECT_EQ(c.range_hi, 5u);
}

TEST(Config, Rejections) {
  ExperimentConfig c;
  EXPECT_THROW(set_config_value(c, "colour", "blue"), Error);
  EXPECT_THROW(set_config_value(c, "nodes", "many"), Error);
  EXPECT_THROW(parse_config("latency=warp").validate(), Error);
  EXPECT_THROW(parse_config("curve=nosuchcurve").validate(), Error);
  EXPECT_THROW(parse_config("radio_range=3").validate(), Error);
  EXPECT_THROW(parse_config("range=9..4").validate(), Error);
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
}

TEST(Sweep, TwoNodes) {
  ExperimentConfig cfg;
  const auto row = sweep_one(cfg, 2);
  const auto m = LatencyModel::preset("mica2");
  EXPECT_EQ(row.pairwise_messages, 3u);
  EXPECT_EQ(row.pairwise_link_transmissions, 3u);
  EXPECT_EQ(row.path_pairs, 1u);
  EXPECT_EQ(row.group_rounds, 1u);
  EXPECT_GT(m.per_message, 0.0);
  EXPECT_GE(row.pairwise_total_time, 3 * (m.per_message + m.per_hop));
}

TEST(Sweep, TenNodeFullMesh) {
  ExperimentConfig cfg;
  const auto row = sweep_one(cfg, 10);
  EXPECT_EQ(row.pairwise_messages, 135u);
  EXPECT_EQ(row.pairwise_link_transmissions, 135u);
  EXPECT_EQ(row.group_rounds, 4u);
  EXPECT_EQ(row.path_messages, 3 * row.path_pairs);
}

TEST(Sweep, SparseFieldUsesMultiHopPaths) {
  ExperimentConfig cfg;
  cfg.radio_range = 0.4;
  const auto row = sweep_one(cfg, 14);
  const auto topo = gen_topology(14, 0.4, cfg.seed_topology);
  EXPECT_EQ(row.edges, topo.edge_count());
  EXPECT_LT(row.edges, 14u * 13u / 2u);
  EXPECT_EQ(row.pairwise_messages, 3 * topo.edge_count());
  EXPECT_EQ(row.path_messages, 3 * row.path_pairs);
  EXPECT_GE(row.path_link_transmissions, 2 * row.path_messages);
}

TEST(Sweep, SparseVerdictIsOk) {
  ExperimentConfig cfg;
  cfg.radio_range = 0.4;
  cfg.range_lo = 10;
  cfg.range_hi = 13;
  const auto r = cmd_sweep(cfg);
  EXPECT_TRUE(r.ok) << r.output;
}

TEST(Sweep, CsvIsReproducible) {
  ExperimentConfig cfg;
  cfg.range_hi = 8;
  const auto a = cmd_sweep(cfg);
  const auto b = cmd_sweep(cfg);
  EXPECT_TRUE(a.ok);
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(a.output.rfind("# config: ", 0), 0u);
  EXPECT_NE(a.output.find("# verdict: OK"), std::string::npos);
  cfg.seed_protocol = 2;
  EXPECT_NE(cmd_sweep(cfg).output, a.output);
}

TEST(Sweep, JsonShape) {
  ExperimentConfig cfg;
  cfg.range_hi = 3;
  cfg.format = OutputFormat::Json;
  const auto r = cmd_sweep(cfg);
  EXPECT_TRUE(r.ok);
  EXPECT_NE(r.output.find("\"config\""), std::string::npos);
  EXPECT_NE(r.output.find("\"rows\""), std::string::npos);
  EXPECT_NE(r.output.find("\"verdict\": \"OK\""), std::string::npos);
}

TEST(GroupDemo, SizesOneFiveSix) {
  for (std::size_t n : {1u, 5u, 6u}) {
    ExperimentConfig cfg;
    cfg.nodes = n;
    const auto r = cmd_group_demo(cfg);
    EXPECT_TRUE(r.ok) << n << "\n" << r.output;
  }
  ExperimentConfig cfg;
  cfg.nodes = 6;
  const auto out = cmd_group_demo(cfg).output;
  for (const char* line : {"1,T11,M1 M2\n", "1,T12,M3 M4\n", "1,T13,M5 M6\n", "2,T21,M1 M2 M3 M4\n", "2,T22,M5 M6\n",
                           "3,T31,M1 M2 M3 M4 M5 M6\n"}) {
    EXPECT_NE(out.find(line), std::string::npos) << line;
  }
}

TEST(MemoryReport, TwelveNodesMatchPrediction) {
  ExperimentConfig cfg;
  const auto r = cmd_memory_report(cfg);
  EXPECT_TRUE(r.ok) << r.output;
  EXPECT_NE(r.output.find(",47,"), std::string::npos);
}

TEST(RevokeDemo, DefaultAndChosenVictim) {
  ExperimentConfig cfg;
  EXPECT_TRUE(cmd_revoke_demo(cfg).ok);
  cfg.victim = 5;
  const auto r = cmd_revoke_demo(cfg);
  EXPECT_TRUE(r.ok) << r.output;
  cfg.victim = 99;
  EXPECT_THROW(cmd_revoke_demo(cfg), Error);
}

TEST(Partition, BlocksByX) {
  const auto topo = gen_topology(10, 0.5, 3);
  const auto groups = partition_groups(topo, 4);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[2].size(), 2u);
  double last = -1;
  for (const auto& g : groups) {
    double lo = 2, hi = -1;
    for (NodeId i : g) {
      lo = std::min(lo, topo.positions()[i].x);
      hi = std::max(hi, topo.positions()[i].x);
    }
    EXPECT_GT(lo, last);
    last = hi;
  }
}
