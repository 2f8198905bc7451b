#include <random>

#include <gtest/gtest.h>

#include "moran/ball_oracle.hpp"
#include "moran/dimension.hpp"
#include "moran/error.hpp"
#include "oracles.hpp"

using moran::Index;
using moran::SequenceSpec;

namespace {

const moran::MoranSpec kCantor{SequenceSpec::constant(4), SequenceSpec::constant(2), "cantor"};
const moran::MoranSpec kExample{SequenceSpec::geometric(4), SequenceSpec::constant(2), "example"};

mpq_class q(long p, long d) { return mpq_class(p, d); }

}  // namespace

TEST(BallOracle, IntervalExamples) {
  auto m = moran::interval_measure(kCantor, 0, q(1, 4), 1);
  EXPECT_EQ(m.approximant, q(1, 2));
  EXPECT_TRUE(m.resolved());
  m = moran::interval_measure(kCantor, 0, q(3, 16), 2);
  EXPECT_EQ(m.approximant, q(1, 2));
  EXPECT_EQ(m.lower, q(1, 2));
  EXPECT_EQ(m.upper, q(1, 2));
  for (Index rank : {1, 3, 7}) {
    EXPECT_EQ(moran::interval_measure(kExample, 0, 1, rank).approximant, 1);
  }
}

TEST(BallOracle, BallExamples) {
  EXPECT_EQ(moran::ball_measure(kCantor, {0, 0}, q(3, 16), 2).approximant, q(1, 2));
  EXPECT_EQ(moran::ball_measure(kCantor, {1, 1}, 1, 2).approximant, 1);
  const auto m = moran::ball_measure(kCantor, {1}, q(1, 16), 2);
  EXPECT_EQ(m.approximant, q(1, 4));
  EXPECT_EQ(m.upper, q(1, 4));
  EXPECT_EQ(moran::point_of(kCantor, {1, 1}), q(5, 16));
}

TEST(BallOracle, PartialIntervalsBracketTheApproximant) {
  const auto m = moran::interval_measure(kCantor, q(1, 32), q(9, 32), 2);
  EXPECT_LT(m.lower, m.approximant);
  EXPECT_LT(m.approximant, m.upper);
  EXPECT_FALSE(m.resolved());
}

TEST(BallOracle, Preconditions) {
  EXPECT_THROW(moran::interval_measure(kCantor, q(1, 2), q(1, 4), 2), moran::Error);
  EXPECT_THROW(moran::ball_measure(kCantor, {0}, 0, 2), moran::Error);
  EXPECT_THROW(moran::point_of(kCantor, {2}), moran::Error);
  const std::vector<moran::ScalePair> same{{q(1, 16), q(1, 16)}};
  EXPECT_THROW(moran::empirical_exponents(kCantor, 4, same, {{0, 0, 0, 0}}), moran::Error);
}

class IntervalOracle : public ::testing::TestWithParam<int> {};

TEST_P(IntervalOracle, MatchesEnumeration) {
  std::mt19937_64 rng(500 + GetParam());
  const auto spec = oracle::random_spec(rng, 4, 7);
  std::uniform_int_distribution<long> num(0, 997);
  for (int t = 0; t < 20; ++t) {
    mpq_class a(num(rng), 997), c(num(rng), 997);
    a.canonicalize();
    c.canonicalize();
    if (a > c) std::swap(a, c);
    for (Index rank = 1; rank <= 4; ++rank) {
      const auto got = moran::interval_measure(spec, a, c, rank);
      const auto ref = oracle::interval_measure(spec, a, c, rank);
      EXPECT_EQ(got.lower, ref.lower);
      EXPECT_EQ(got.upper, ref.upper);
      EXPECT_EQ(got.approximant, ref.approximant);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, IntervalOracle, ::testing::Range(0, 6));

TEST(BallOracle, ScaleGridAndPaths) {
  const auto grid = moran::prefix_scale_grid(kCantor, 6, 2);
  // pairs (j, m) with m - j >= 2, m <= 6, j >= 0
  EXPECT_EQ(grid.size(), 15u);
  for (const auto& s : grid) EXPECT_GE(s.big / s.small, 16);
  const auto p1 = moran::random_paths(kCantor, 8, 5, 42), p2 = moran::random_paths(kCantor, 8, 5, 42);
  EXPECT_EQ(p1, p2);
  for (const auto& p : p1) {
    ASSERT_EQ(p.size(), 8u);
    for (auto d : p) EXPECT_LT(d, 2u);
  }
}

TEST(BallOracle, CantorExponentsNearHalf) {
  const auto grid = moran::prefix_scale_grid(kCantor, 12, 10);
  const auto paths = moran::random_paths(kCantor, 12, 50, 20240611);
  const auto e = moran::empirical_exponents(kCantor, 12, grid, paths);
  // the lower extreme is 9/20 exactly, so allow rounding only
  EXPECT_GE(e.lower_emp, 0.45L - 1e-12L);
  EXPECT_LE(e.assouad_emp, 0.55L + 1e-12L);
  EXPECT_LE(e.lower_emp, e.assouad_emp);
}

TEST(BallOracle, ExampleLowerExponentSmall) {
  const auto grid = moran::prefix_scale_grid(kExample, 8, 4);
  const auto paths = moran::random_paths(kExample, 8, 50, 7);
  const auto e = moran::empirical_exponents(kExample, 8, grid, paths);
  EXPECT_LE(e.lower_emp, 0.1);
}

TEST(BallOracle, RandomSpecsBracketedByFormulas) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 3; ++i) {
    const auto spec = oracle::random_spec(rng, 15, 16);
    const auto grid = moran::prefix_scale_grid(spec, 12, 4);
    const auto paths = moran::random_paths(spec, 12, 50, 11 + i);
    const auto e = moran::empirical_exponents(spec, 12, grid, paths);
    const auto n = moran::Threshold::power_of(2, 6);
    const auto a = moran::assouad_estimate(spec, 15, n);
    const auto l = moran::lower_estimate(spec, 15, n);
    EXPECT_LE(e.assouad_emp, a.estimate + 0.05L);
    EXPECT_LE(l.estimate - 0.05L, e.lower_emp);
  }
}
