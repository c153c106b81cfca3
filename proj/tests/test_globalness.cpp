#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dihp;

namespace {
SpacePtr space(std::size_t n, std::size_t m) { return IndexedSpace::make(MatchingSpace::standard(n, m)); }
}  // namespace

TEST(IsGlobal, FullSpace) {
  auto sp = space(6, 2);
  EXPECT_TRUE(is_global(OmegaSubset::full(sp)).global);
  auto z = LabeledMatching::parse("1-2:+1");
  EXPECT_TRUE(is_global(OmegaSubset::full(sp, z)).global);
}

TEST(IsGlobal, FixedEdgeIsNotGlobal) {
  auto sp = space(8, 2);
  auto z = LabeledMatching::parse("1-2:+1");
  auto A = OmegaSubset::where(sp, [&](const LabeledMatching& y) { return y.label(Edge(1, 2)) == 1; });
  // 15 matchings contain 1-2, times 2 labels on the other edge
  EXPECT_EQ(A.size(), 30u);
  EXPECT_EQ(A.density(), Rational(1, 28));
  auto chk = is_global(A);
  EXPECT_FALSE(chk.global);
  EXPECT_FALSE(oracle::is_global(A));
  ASSERT_TRUE(chk.witness);
  // the densest restriction is the whole of A at density 1, i.e. ratio 28 against the base
  EXPECT_TRUE(subsumes(*chk.witness, z));
}

TEST(IsGlobal, AgreesWithOracle) {
  auto sp = space(6, 2);
  Rng rng(9);
  int agree = 0;
  for (int t = 0; t < 60; ++t) {
    auto A = random_subset(sp, 1 + rng.below(sp->size()), rng);
    bool g = is_global(A).global;
    EXPECT_EQ(g, oracle::is_global(A)) << t;
    agree += g;
  }
  EXPECT_GT(agree, 0);
}

TEST(IsGlobal, HalfDensityUsuallyGlobal) {
  auto sp = space(6, 1);
  int global = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    global += is_global(random_subset_density(sp, 0.5, rng)).global;
  }
  EXPECT_GT(global, 90);
}

TEST(Decompose, AlreadyGlobalIsOnePiece) {
  auto sp = space(6, 2);
  auto A = OmegaSubset::full(sp);
  auto pieces = decompose(A);
  ASSERT_EQ(pieces.size(), 1u);
  EXPECT_EQ(pieces[0].set, A);
}

TEST(Decompose, FixedEdgeSet) {
  auto sp = space(8, 2);
  auto A = OmegaSubset::where(sp, [&](const LabeledMatching& y) { return y.label(Edge(1, 2)) == 1; });
  auto pieces = decompose(A);
  ASSERT_FALSE(pieces.empty());
  EXPECT_EQ(pieces[0].set.members(), A.members() & pieces[0].set.members());
  for (const auto& p : pieces) EXPECT_TRUE(oracle::is_global(p.set));
  Bitset uni(sp->size());
  for (const auto& p : pieces) uni |= p.set.members();
  EXPECT_EQ(uni, A.members());
  // every piece lives under the edge 1-2 fixed to +1
  for (const auto& p : pieces) EXPECT_EQ(p.set.base().label(Edge(1, 2)), 1);
}

TEST(Decompose, PartitionGlobalAndPotential) {
  auto sp = space(6, 2);
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    auto A = random_subset_density(sp, t % 2 ? 0.5 : 0.25, rng);
    auto pieces = decompose(A);
    Bitset uni(sp->size());
    std::size_t total = 0;
    for (const auto& p : pieces) {
      EXPECT_FALSE(uni.intersects(p.set.members()));
      uni |= p.set.members();
      total += p.set.size();
      EXPECT_TRUE(oracle::is_global(p.set));
      EXPECT_TRUE(subsumes(p.set.base(), A.base()));
    }
    EXPECT_EQ(uni, A.members());
    EXPECT_EQ(total, A.size());
    EXPECT_TRUE(decomposition_bound(A, pieces).holds());
  }
}

TEST(Decompose, RestrictedBase) {
  auto sp = space(8, 2);
  auto z = LabeledMatching::parse("3-5:-1");
  Rng rng(4);
  auto A = random_subset(sp, 10, rng, z);
  auto pieces = decompose(A);
  for (const auto& p : pieces) {
    EXPECT_TRUE(subsumes(p.set.base(), z));
    EXPECT_TRUE(oracle::is_global(p.set));
  }
}

TEST(Potential, Examples) {
  auto sp = space(6, 2);
  Rectangle R{{OmegaSubset::full(sp), OmegaSubset::full(sp)}};
  EXPECT_DOUBLE_EQ(potential(R), 0.0);
  Rng rng(1);
  R.factors[0] = random_subset(sp, sp->size() / 2, rng);
  EXPECT_DOUBLE_EQ(potential(R), 1.0);
  auto z = LabeledMatching::parse("1-2:-1");
  R.factors[0] = OmegaSubset::full(sp, z);
  // |Omega_z| = 2 * C(4,2) = 12 of 180; the factor is all of Omega_z
  EXPECT_EQ(R.factors[0].size(), 12u);
  EXPECT_DOUBLE_EQ(potential(R), 1.0);
  R.factors[0] = random_subset(sp, 3, rng, z);
  EXPECT_NEAR(potential(R), 1.0 + std::log2(12.0 / 3.0), 1e-12);
  R.factors[1] = R.factors[1].intersect(Bitset(sp->size()));
  EXPECT_THROW(potential(R), std::domain_error);
}

TEST(Rectangle, GlobalIffFactorsAre) {
  auto sp = space(6, 2);
  auto bad = OmegaSubset::where(sp, [](const LabeledMatching& y) { return y.label(Edge(1, 2)) == 1; });
  Rectangle R{{OmegaSubset::full(sp), OmegaSubset::full(sp)}};
  EXPECT_TRUE(rectangle_is_global(R));
  R.factors[1] = bad;
  EXPECT_FALSE(rectangle_is_global(R));
}

TEST(Decompose, JsonLines) {
  auto sp = space(6, 2);
  Rng rng(8);
  auto pieces = decompose(random_subset_density(sp, 0.25, rng));
  auto text = decomposition_jsonl(pieces);
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("restriction"));
    ++lines;
  }
  EXPECT_EQ(lines, pieces.size());
}
