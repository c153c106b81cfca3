#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dihp;

TEST(MaxCut, GrayCodeMatchesBruteForce) {
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    int n = 2 + int(rng.below(9));
    std::vector<Edge> E;
    for (int j = 0; j < 2 * n; ++j) {
      Vertex u = 1 + Vertex(rng.below(n)), v = 1 + Vertex(rng.below(n));
      if (u != v) E.push_back(Edge(std::min(u, v), std::max(u, v)));
    }
    EXPECT_EQ(max_cut_exact(n, E), oracle::max_cut(n, E)) << t;
  }
  EXPECT_EQ(max_cut_exact(3, {Edge(1, 2), Edge(2, 3), Edge(1, 3)}), 2u);
  EXPECT_EQ(max_cut_exact(1, {}), 0u);
  EXPECT_THROW(max_cut_exact(25, {}), CapacityError);
}

TEST(Stream, Conventions) {
  auto y1 = LabeledMatching::parse("1-2:-1,3-4:+1");
  auto y2 = LabeledMatching::parse("1-3:+1,2-4:-1");
  auto cross = build_stream({y1, y2}, 4, StreamConvention::KeepCrossing);
  EXPECT_EQ(cross.dump(), "1-2\n2-4\n");
  EXPECT_EQ(cross.offsets, (std::vector<std::size_t>{0, 1, 2}));
  auto pos = build_stream({y1, y2}, 4, StreamConvention::KeepPositive);
  EXPECT_EQ(pos.dump(), "3-4\n1-3\n");
  EXPECT_THROW(parse_convention("both"), std::invalid_argument);
}

TEST(Stream, YesInstancesFullyCut) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    auto inst = sample_yes(12, 3, 5, rng);
    auto st = build_stream(inst);
    for (const auto& e : st.edges) EXPECT_NE(inst.witness->side(e.u), inst.witness->side(e.v));
    EXPECT_EQ(max_cut_exact(12, st.edges), st.edges.size());
  }
}

TEST(Protocol, AdapterAccountsMessages) {
  Rng rng(2);
  auto inst = sample_no(10, 3, 4, rng);
  auto st = build_stream(inst);
  EdgeCounter alg(12);
  auto run = run_as_protocol(alg, st);
  EXPECT_EQ(run.messages, 4u);
  EXPECT_EQ(run.bits, 4 * alg.state_bits());
  EXPECT_DOUBLE_EQ(run.output, run_monolithic(alg, st));
  EXPECT_DOUBLE_EQ(run.output, trivial_half_approx(st.edges));
}

TEST(Protocol, ConstantAlgorithmHasNoAdvantage) {
  auto dec = streaming_decision([] { return std::make_unique<ConstantAlgorithm>(1.0); }, 4, 0.5);
  EXPECT_EQ(advantage_exact(dec, 4, 1, 2).advantage(), 0);
}

TEST(Protocol, OverflowDetected) {
  EdgeCounter alg(1);
  EdgeStream st{4, {Edge(1, 2), Edge(3, 4)}, {0, 2}};
  EXPECT_THROW(run_as_protocol(alg, st), std::overflow_error);
}

TEST(Gap, RowsAndDeterminism) {
  auto a = gap_experiment(10, 2, 4, 15, 7);
  auto b = gap_experiment(10, 2, 4, 15, 7);
  ASSERT_EQ(a.size(), 30u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].edges, b[i].edges);
    EXPECT_EQ(a[i].maxcut, b[i].maxcut);
  }
  auto s = summarize_gap(a);
  EXPECT_TRUE(s.yes_all_full);
  EXPECT_DOUBLE_EQ(s.mean_yes, 1.0);
}
