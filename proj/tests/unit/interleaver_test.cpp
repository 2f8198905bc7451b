#include <cmath>

#include <gtest/gtest.h>

#include "moran/dimension.hpp"
#include "moran/error.hpp"
#include "moran/interleaver.hpp"

using moran::Index;
using moran::Star;
using moran::Targets;

namespace {

Targets targets(long l, long h, long p, long a, long den) {
  return {mpq_class(l, den), mpq_class(h, den), mpq_class(p, den), mpq_class(a, den)};
}

const Targets kQuad = targets(1, 2, 3, 4, 5);

// M and block boundaries from the growth rule, written out directly.
struct RefSchedule {
  std::vector<std::array<Index, 4>> M;
  std::vector<std::array<Index, 4>> S;
};

RefSchedule reference(int K) {
  RefSchedule r;
  Index h = 1, end = 0;
  for (int k = 1; k <= K; ++k) {
    const Index p = k * h * h;
    const Index la = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(k))));
    const std::array<Index, 4> m{h, p, la, la};
    std::array<Index, 4> s{};
    for (int i = 0; i < 4; ++i) s[i] = end += m[i];
    r.M.push_back(m);
    r.S.push_back(s);
    h = (k + 1) * p * p;
  }
  return r;
}

}  // namespace

TEST(Interleaver, SharedParams) {
  auto p = moran::shared_params(kQuad);
  EXPECT_EQ(p.alpha0, 2u);
  EXPECT_EQ(p.alpha1, 16u);
  EXPECT_EQ(p.beta, 32u);
  p = moran::shared_params(targets(1, 1, 1, 1, 2));
  EXPECT_NO_THROW(moran::validate_params(p, mpq_class(1, 2), moran::RecursionMode::relaxed));
  p = moran::shared_params(targets(0, 0, 0, 0, 1));
  EXPECT_EQ(p.alpha0, 2u);
  EXPECT_EQ(p.alpha1, 0u);
  EXPECT_EQ(p.beta, 4u);
  EXPECT_THROW(moran::shared_params(targets(1, 1, 1, 1, 1)), moran::Error);
}

TEST(Interleaver, TargetsValidation) {
  EXPECT_THROW(targets(2, 1, 3, 4, 5).validate(), moran::Error);
  EXPECT_THROW(targets(1, 2, 3, 6, 5).validate(), moran::Error);
  EXPECT_NO_THROW(targets(0, 0, 0, 0, 1).validate());
  EXPECT_EQ(kQuad.of(Star::P), mpq_class(3, 5));
}

TEST(Interleaver, ScheduleExamples) {
  const auto s3 = moran::build_schedule(3);
  using V = std::vector<Index>;
  EXPECT_EQ(s3.M[0], (V{1, 2, 192}));
  EXPECT_EQ(s3.M[1], (V{1, 8, 110592}));
  EXPECT_EQ(s3.M[2], (V{1, 1, 1}));
  EXPECT_EQ(s3.M[3], (V{1, 1, 1}));
  const auto s1 = moran::build_schedule(1);
  EXPECT_EQ(s1.S[0][0], 1);
  EXPECT_EQ(s1.S[1][0], 2);
  EXPECT_EQ(s1.S[2][0], 3);
  EXPECT_EQ(s1.S[3][0], 4);
  EXPECT_THROW(moran::build_schedule(5), moran::Error);
  EXPECT_THROW(moran::build_schedule(0), moran::Error);
}

TEST(Interleaver, ScheduleMatchesGrowthRule) {
  for (int K = 1; K <= 4; ++K) {
    const auto s = moran::build_schedule(K);
    const auto ref = reference(K);
    ASSERT_EQ(s.blocks.size(), static_cast<std::size_t>(4 * K));
    for (int k = 1; k <= K; ++k) {
      for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(s.M[i][k - 1], ref.M[k - 1][i]);
        EXPECT_EQ(s.S[i][k - 1], ref.S[k - 1][i]);
        const auto& b = s.block(static_cast<Star>(i), k);
        EXPECT_EQ(b.last, ref.S[k - 1][i]);
        EXPECT_EQ(b.length(), ref.M[k - 1][i]);
      }
    }
    EXPECT_TRUE(moran::schedule_invariants_hold(s));
  }
  // M_{P,4} = 4 M_{H,4}^2 with M_{H,4} = 4 * 110592^2
  const Index mh4 = Index{4} * 110592 * 110592;
  EXPECT_EQ(moran::build_schedule(4).M[1][3], 4 * mh4 * mh4);
}

TEST(Interleaver, ComponentsAndSpecTerms) {
  const auto params = moran::shared_params(kQuad);
  const auto res = moran::interleave(kQuad, params, 3);
  const auto& c = res.components;
  EXPECT_EQ(*c[0].period, "001");
  EXPECT_EQ(*c[1].period, "110");
  EXPECT_EQ(*c[2].period, "0");
  EXPECT_EQ(*c[3].period, "1");
  // each block restarts its component word; b is beta throughout
  for (const auto& blk : res.schedule.blocks) {
    const std::string& w = *c[static_cast<std::size_t>(blk.star)].period;
    const Index probe[] = {blk.first, blk.last, blk.first + blk.length() / 2};
    for (Index i : probe) {
      const char sym = w[static_cast<std::size_t>((i - blk.first) % static_cast<Index>(w.size()))];
      EXPECT_EQ(res.spec.q.term(i), sym == '1' ? 16 : 2) << moran::to_string(blk.star) << " k=" << blk.k;
      EXPECT_EQ(res.spec.b.term(i), 32);
    }
  }
  EXPECT_EQ(res.tail_begin, res.schedule.block(Star::A, 2).last + 1);
  EXPECT_EQ(*res.spec.horizon(), res.schedule.total());
}

TEST(Interleaver, ZeroTargetUsesGeometricBlocks) {
  const auto t = targets(0, 2, 3, 4, 5);
  const auto res = moran::interleave(t, moran::shared_params(t), 3);
  const auto& c = res.components[static_cast<std::size_t>(Star::L)];
  EXPECT_TRUE(c.zero_branch);
  const auto& blk = res.schedule.block(Star::L, 3);
  EXPECT_EQ(res.spec.b.term(blk.first), res.params.beta);
  EXPECT_EQ(res.spec.q.term(blk.first), res.params.alpha0);
}

TEST(Interleaver, DensityRatios) {
  const auto res = moran::interleave(kQuad, moran::shared_params(kQuad), 4);
  const auto d = moran::density_diagnostics(res);
  const auto ref = reference(3);
  for (const auto& r : d.ratios) {
    if (r.k == 3) {
      // b constant: ratio = M / S
      const auto i = static_cast<std::size_t>(r.star);
      mpq_class want(static_cast<long>(ref.M[2][i]), static_cast<long>(ref.S[2][i]));
      want.canonicalize();
      EXPECT_EQ(*r.exact, want) << moran::to_string(r.star);
    }
    if (r.k >= 3 && (r.star == Star::H || r.star == Star::P)) EXPECT_GE(r.value, 0.9L);
    if (r.k >= 3 && (r.star == Star::L || r.star == Star::A)) EXPECT_LE(r.value, 0.1L);
  }
  for (bool ok : d.condition_1prime) EXPECT_TRUE(ok);
  for (const auto& s : d.coverage) {
    EXPECT_GE(s.fraction, 0.0L);
    EXPECT_LE(s.fraction, 1.0L + 1e-12L);
  }
}

TEST(Interleaver, CoveredFractionInsideOneBlock) {
  const auto res = moran::interleave(kQuad, moran::shared_params(kQuad), 3);
  const auto& blk = res.schedule.block(Star::P, 3);
  EXPECT_EQ(moran::covered_fraction(res.spec, res.schedule, blk.first + 5, blk.first + 400, moran::LogProduct::of(2)),
            1.0L);
}

TEST(Interleaver, PrefixTraceReachesHausdorffAndPacking) {
  const auto res = moran::interleave(kQuad, moran::shared_params(kQuad), 4);
  const auto [h, p] = moran::hausdorff_packing_estimate(res.spec, res.schedule.total(), res.tail_begin);
  EXPECT_NEAR(static_cast<double>(h.estimate), 0.4, 0.05);
  EXPECT_NEAR(static_cast<double>(p.estimate), 0.6, 0.05);
}

TEST(Interleaver, EqualTargetsCollapse) {
  const auto t = targets(1, 1, 1, 1, 2);
  const auto res = moran::interleave(t, moran::shared_params(t), 3);
  const auto [h, p] = moran::hausdorff_packing_estimate(res.spec, res.schedule.total(), res.tail_begin);
  EXPECT_NEAR(static_cast<double>(h.estimate), 0.5, 0.02);
  EXPECT_NEAR(static_cast<double>(p.estimate), 0.5, 0.02);
}
