#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dihp;

TEST(Bipartition, LabelRule) {
  auto x = Bipartition::parse("0110");
  auto y = label_by(x, {Edge(1, 2), Edge(3, 4)});
  EXPECT_EQ(y.label(Edge(1, 2)), -1);
  EXPECT_EQ(y.label(Edge(3, 4)), -1);
  EXPECT_EQ(label_by(x, {Edge(2, 3)}).label(Edge(2, 3)), 1);
  EXPECT_TRUE(subspace_membership(x, y));
  EXPECT_FALSE(subspace_membership(Bipartition::parse("0000"), y));
  EXPECT_EQ(Bipartition::parse(x.str()).bits, x.bits);
}

TEST(Instance, SerializeRoundTrip) {
  Rng rng(3);
  auto inst = sample_yes(8, 3, 4, rng);
  auto back = DihpInstance::parse(inst.serialize());
  EXPECT_EQ(back.n, 8u);
  EXPECT_EQ(back.m, 3u);
  EXPECT_EQ(back.K(), 4u);
  EXPECT_TRUE(back.yes);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(back.players[i], inst.players[i]);
  ASSERT_TRUE(back.witness);
  EXPECT_EQ(back.witness->bits, inst.witness->bits);
  for (const auto& y : inst.players) EXPECT_TRUE(subspace_membership(*inst.witness, y));
}

TEST(Instance, ParseRejectsBadInput) {
  EXPECT_THROW(DihpInstance::parse("#dihp n=4 m=1 K=2 label=no\n1-2:+1\n"), std::exception);
  EXPECT_THROW(DihpInstance::parse("#dihp n=4 m=1 K=1 label=no\n1-5:+1\n"), std::exception);
}

// Pr[x|A] from the mixture definition
TEST(Conditional, MatchesMixture) {
  auto sp = IndexedSpace::make(MatchingSpace::standard(6, 2));
  Rng rng(11);
  for (int t = 0; t < 5; ++t) {
    auto A = random_subset(sp, 1 + rng.below(sp->size()), rng);
    auto dist = conditional_distribution(A);
    Rational total = 0;
    for (std::uint64_t x = 0; x < 64; ++x) {
      Rational p = 0;
      for (auto i : A.indices())
        if (subspace_membership(Bipartition{6, x}, sp->at(i))) p += Rational(1, 16);
      p /= Rational(long(A.size()));
      EXPECT_EQ(dist[x], p);
      EXPECT_EQ(conditional_probability(A, Bipartition{6, x}), p);
      total += p;
    }
    EXPECT_EQ(total, 1);
  }
}

TEST(Advantage, ConstantIsZero) {
  auto a = advantage_exact([](const auto&) { return true; }, 4, 1, 2);
  EXPECT_EQ(a.p_yes, 1);
  EXPECT_EQ(a.p_no, 1);
  EXPECT_EQ(a.advantage(), 0);
}

TEST(Advantage, SameEdgeSameLabel) {
  // YES: two players holding the same edge always agree on its label
  auto dec = [](const std::vector<LabeledMatching>& ys) {
    return ys[0].support() == ys[1].support() && ys[0].signs() == ys[1].signs();
  };
  auto a = advantage_exact(dec, 4, 1, 2);
  // both hold the same edge w.p. 1/6; NO agrees on the label w.p. 1/2
  EXPECT_EQ(a.p_yes, Rational(1, 6));
  EXPECT_EQ(a.p_no, Rational(1, 12));
  EXPECT_EQ(a.advantage(), Rational(1, 12));

  auto mc = advantage_monte_carlo(dec, 4, 1, 2, 20000, 2);
  EXPECT_NEAR(mc.estimate, 1.0 / 12, 5 * mc.std_error);
  EXPECT_GT(mc.std_error, 0);
}
