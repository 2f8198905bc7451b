#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "moran/dimension.hpp"
#include "moran/error.hpp"
#include "oracles.hpp"

using moran::DimensionKind;
using moran::DimensionReport;
using moran::Index;
using moran::SequenceSpec;
using moran::Threshold;

namespace {

const moran::MoranSpec kCantor{SequenceSpec::constant(4), SequenceSpec::constant(2), "cantor"};
const moran::MoranSpec kExample{SequenceSpec::geometric(4), SequenceSpec::constant(2), "example"};
const moran::MoranSpec kCyclic{SequenceSpec::constant(16), SequenceSpec::blocks({}, {{2, 1}, {8, 1}}), "cyclic"};

// Exact where both points carry rationals, otherwise by value.
int order(const moran::TracePoint& a, const moran::TracePoint& b) {
  if (a.exact && b.exact) return cmp(*a.exact, *b.exact) < 0 ? -1 : (*a.exact == *b.exact ? 0 : 1);
  return a.value < b.value ? -1 : (a.value == b.value ? 0 : 1);
}

void expect_monotone(const DimensionReport& r) {
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const int o = order(r.trace[i - 1], r.trace[i]);
    if (r.direction == moran::Monotone::nonincreasing) {
      EXPECT_GE(o, 0) << moran::to_string(r.kind) << " at " << r.trace[i].label;
    } else {
      EXPECT_LE(o, 0) << moran::to_string(r.kind) << " at " << r.trace[i].label;
    }
  }
}

bool has(const DimensionReport& r, const char* c) {
  return std::find(r.caveats.begin(), r.caveats.end(), c) != r.caveats.end();
}

}  // namespace

TEST(Dimension, CantorAllFourExactlyHalf) {
  const mpq_class half(1, 2);
  const auto a = moran::assouad_estimate(kCantor, 64, Threshold::integer(8));
  const auto l = moran::lower_estimate(kCantor, 30, Threshold::power_of(2, 10));
  const auto [h, p] = moran::hausdorff_packing_estimate(kCantor, 64);
  for (const auto* r : {&a, &l, &h, &p}) {
    ASSERT_TRUE(r->exact) << moran::to_string(r->kind);
    EXPECT_EQ(*r->exact, half) << moran::to_string(r->kind);
  }
  EXPECT_TRUE(has(a, moran::caveat::periodic_limit));
  expect_monotone(a);
  expect_monotone(l);
  EXPECT_EQ(*moran::assouad_bounded_form(kCantor, 30, 5).exact, half);
}

TEST(Dimension, CantorFiniteWindowsMatchClosedForm) {
  // ratio (n+1)/(2n+1) falls with n; the shortest window reaching 2^20 has 2n+1 = 21
  const auto a = moran::assouad_estimate(kCantor, 64, Threshold::power_of(2, 20));
  ASSERT_TRUE(a.finite_exact);
  EXPECT_EQ(*a.finite_exact, mpq_class(11, 21));
  const auto ref = oracle::windows(kCantor, 64, moran::WindowFamily::assouad, Threshold::power_of(2, 20));
  EXPECT_EQ(*a.witness, ref.witness);
}

TEST(Dimension, ExampleAssouadAtDepthTwenty) {
  const auto a = moran::assouad_estimate(kExample, 20, Threshold::power_of(2, 20));
  ASSERT_TRUE(a.exact);
  EXPECT_EQ(*a.exact, mpq_class(5, 29));
  EXPECT_EQ(*a.witness, (moran::Window{1, 4}));
  EXPECT_FALSE(has(a, moran::caveat::periodic_limit));
  expect_monotone(a);
  EXPECT_EQ(a.trace.back().label, "2^20");
}

TEST(Dimension, ExampleLowerShortcut) {
  const auto l = moran::lower_estimate(kExample, 20, Threshold::power_of(2, 20));
  ASSERT_TRUE(l.exact);
  EXPECT_EQ(*l.exact, 0);
  EXPECT_TRUE(has(l, moran::caveat::b_unbounded));
  expect_monotone(l);
  const auto w = moran::lower_shortcut_witnesses(kExample);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->size(), 10u);
  EXPECT_FALSE(moran::lower_shortcut_witnesses(kCyclic));
}

TEST(Dimension, ExampleBoundedForm) {
  const auto r = moran::assouad_bounded_form(kExample, 20, 10);
  ASSERT_TRUE(r.exact);
  EXPECT_EQ(*r.exact, mpq_class(1, 21));
  EXPECT_EQ(*r.witness, (moran::Window{1, 19}));
  expect_monotone(r);
}

TEST(Dimension, ExamplePrefixRatios) {
  for (Index n = 1; n <= 20; ++n) EXPECT_EQ(*oracle::prefix_ratio(kExample, n), mpq_class(1, static_cast<long>(n + 1)));
  const auto [h, p] = moran::hausdorff_packing_estimate(kExample, 20, 10);
  EXPECT_EQ(*h.exact, mpq_class(1, 21));
  EXPECT_EQ(*p.exact, mpq_class(1, 11));
  expect_monotone(h);
  expect_monotone(p);
}

TEST(Dimension, CyclicFiniteValuesFromOracle) {
  const Threshold n = Threshold::power_of(2, 40);
  const auto a = moran::assouad_estimate(kCyclic, 60, n);
  const auto l = moran::lower_estimate(kCyclic, 60, n);
  const auto ra = oracle::windows(kCyclic, 60, moran::WindowFamily::assouad, n);
  const auto rl = oracle::windows(kCyclic, 60, moran::WindowFamily::lower, n);
  EXPECT_EQ(*a.finite_exact, *moran::exact_ratio(ra.num, ra.den));
  EXPECT_EQ(*a.finite_exact, mpq_class(23, 43));
  EXPECT_EQ(*a.witness, ra.witness);
  EXPECT_EQ(*l.finite_exact, *moran::exact_ratio(rl.num, rl.den));
  EXPECT_EQ(*l.finite_exact, mpq_class(20, 43));
  EXPECT_EQ(*l.witness, rl.witness);
  // the tail is periodic, so the limit is the per-period ratio 4/8
  EXPECT_EQ(*a.exact, mpq_class(1, 2));
  EXPECT_EQ(*l.exact, mpq_class(1, 2));
  expect_monotone(a);
  expect_monotone(l);
}

TEST(Dimension, CyclicBoundedAndPrefix) {
  const auto r = moran::assouad_bounded_form(kCyclic, 61, 40);
  EXPECT_NEAR(static_cast<double>(r.estimate), 0.5, 0.01);
  const auto [h, p] = moran::hausdorff_packing_estimate(kCyclic, 40);
  EXPECT_NEAR(static_cast<double>(h.estimate), 0.5, 0.02);
  EXPECT_NEAR(static_cast<double>(p.estimate), 0.5, 0.02);
}

TEST(Dimension, UnboundedQShortcut) {
  const moran::MoranSpec spec{SequenceSpec::geometric(6), SequenceSpec::geometric(2), "qgeo"};
  const auto a = moran::assouad_estimate(spec, 20, Threshold::power_of(2, 8));
  EXPECT_EQ(*a.exact, 1);
  EXPECT_TRUE(has(a, moran::caveat::q_unbounded));
  EXPECT_THROW(moran::assouad_bounded_form(spec, 20, 5), moran::Error);
}

TEST(Dimension, Errors) {
  const moran::MoranSpec finite{SequenceSpec::explicit_list({4, 4, 4}), SequenceSpec::explicit_list({2, 2, 2}), "f"};
  EXPECT_THROW(moran::assouad_estimate(finite, 5, Threshold::integer(4)), moran::Error);
  EXPECT_THROW(moran::assouad_estimate(finite, 3, Threshold::power_of(2, 30)), moran::Error);
  EXPECT_THROW(moran::assouad_estimate(kCantor, 10, Threshold::integer(1)), moran::Error);
  const auto ok = moran::assouad_estimate(finite, 3, Threshold::integer(4));
  EXPECT_TRUE(has(ok, moran::caveat::horizon_limited));
}

TEST(Dimension, ThresholdLadder) {
  const auto ladder = moran::threshold_ladder(Threshold::power_of(2, 16), 16);
  ASSERT_EQ(ladder.size(), 16u);
  EXPECT_EQ(moran::compare(ladder.front(), Threshold::integer(2)), 0);
  EXPECT_EQ(moran::compare(ladder.back(), Threshold::power_of(2, 16)), 0);
  for (std::size_t i = 1; i < ladder.size(); ++i) EXPECT_LT(moran::compare(ladder[i - 1], ladder[i]), 0);
}

class DimensionRandom : public ::testing::TestWithParam<int> {};

TEST_P(DimensionRandom, FiniteExtremaMatchOracleAndTracesAreMonotone) {
  std::mt19937_64 rng(77 + GetParam());
  const auto spec = oracle::random_spec(rng, 24, 16);
  const Threshold n = Threshold::power_of(2, 12);
  const auto a = moran::assouad_estimate(spec, 24, n);
  const auto l = moran::lower_estimate(spec, 24, n);
  const auto ra = oracle::windows(spec, 24, moran::WindowFamily::assouad, n);
  const auto rl = oracle::windows(spec, 24, moran::WindowFamily::lower, n);
  ASSERT_TRUE(ra.feasible && rl.feasible);
  EXPECT_EQ(*a.witness, ra.witness);
  EXPECT_EQ(*l.witness, rl.witness);
  EXPECT_NEAR(static_cast<double>(a.estimate), static_cast<double>(ra.num.log2() / ra.den.log2()), 1e-15);
  EXPECT_NEAR(static_cast<double>(l.estimate), static_cast<double>(rl.num.log2() / rl.den.log2()), 1e-15);
  expect_monotone(a);
  expect_monotone(l);
  const auto [h, p] = moran::hausdorff_packing_estimate(spec, 24);
  expect_monotone(h);
  expect_monotone(p);
  EXPECT_LE(h.estimate, p.estimate);
}

INSTANTIATE_TEST_SUITE_P(Seeds, DimensionRandom, ::testing::Range(0, 8));
