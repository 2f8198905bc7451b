#include <random>

#include <gtest/gtest.h>

#include "moran/joint_view.hpp"
#include "moran/window_search.hpp"
#include "oracles.hpp"

using moran::Index;
using moran::LogProduct;
using moran::SequenceSpec;
using moran::Threshold;
using moran::WindowFamily;

namespace {

void expect_matches_oracle(const moran::MoranSpec& spec, Index depth, WindowFamily family,
                           const std::vector<Threshold>& ns, const moran::SearchOptions& opts) {
  const moran::JointView view(spec, depth);
  const auto found = moran::search_windows(view, family, ns, opts);
  ASSERT_EQ(found.per_threshold.size(), ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto ref = oracle::windows(spec, depth, family, ns[i]);
    const auto& got = found.per_threshold[i];
    ASSERT_EQ(got.feasible, ref.feasible) << spec.label << " N=" << ns[i].to_string();
    if (!ref.feasible) continue;
    EXPECT_EQ(moran::compare_ratios(got.num, got.den, ref.num, ref.den), 0) << spec.label << " N=" << ns[i].to_string();
    EXPECT_EQ(got.witness, ref.witness) << spec.label << " N=" << ns[i].to_string() << " got (" << (long)got.witness.k
                                        << "," << (long)got.witness.n << ") want (" << (long)ref.witness.k << ","
                                        << (long)ref.witness.n << ")";
  }
}

std::vector<Threshold> powers_of_two(std::initializer_list<int> exps) {
  std::vector<Threshold> out;
  for (int e : exps) out.push_back(Threshold::power_of(2, e));
  return out;
}

const moran::MoranSpec kCyclic{SequenceSpec::constant(16), SequenceSpec::blocks({}, {{2, 1}, {8, 1}}), "cyclic"};
const moran::MoranSpec kExample{SequenceSpec::geometric(4), SequenceSpec::constant(2), "example"};

}  // namespace

TEST(WindowSearch, CyclicKnownWitnesses) {
  const moran::JointView view(kCyclic, 60);
  const auto ns = powers_of_two({40});
  const auto a = moran::search_windows(view, WindowFamily::assouad, ns).per_threshold.at(0);
  ASSERT_TRUE(a.feasible);
  EXPECT_EQ(moran::exact_ratio(a.num, a.den), mpq_class(23, 43));
  EXPECT_EQ(a.witness, (moran::Window{2, 10}));
  const auto l = moran::search_windows(view, WindowFamily::lower, ns).per_threshold.at(0);
  ASSERT_TRUE(l.feasible);
  EXPECT_EQ(moran::exact_ratio(l.num, l.den), mpq_class(20, 43));
  EXPECT_EQ(l.witness, (moran::Window{2, 11}));
}

TEST(WindowSearch, ExampleAssouadAtDepthTwenty) {
  const moran::JointView view(kExample, 20);
  const auto a = moran::search_windows(view, WindowFamily::assouad, powers_of_two({20})).per_threshold.at(0);
  ASSERT_TRUE(a.feasible);
  EXPECT_EQ(moran::exact_ratio(a.num, a.den), mpq_class(5, 29));
  EXPECT_EQ(a.witness, (moran::Window{1, 4}));
}

TEST(WindowSearch, InfeasibleThreshold) {
  const moran::MoranSpec tiny{SequenceSpec::constant(4), SequenceSpec::constant(2), "tiny"};
  const moran::JointView view(tiny, 3);
  const auto r = moran::search_windows(view, WindowFamily::assouad, powers_of_two({40}));
  EXPECT_FALSE(r.per_threshold.at(0).feasible);
}

class WindowOracle : public ::testing::TestWithParam<int> {};

TEST_P(WindowOracle, ExhaustiveAndCompressedMatchBruteForce) {
  std::mt19937_64 rng(1000 + GetParam());
  const auto spec = oracle::random_spec(rng, 18, 16);
  const auto ns = powers_of_two({1, 3, 6, 10, 20});
  moran::SearchOptions compressed;
  compressed.exhaustive_limit = 0;
  for (auto family : {WindowFamily::assouad, WindowFamily::lower}) {
    expect_matches_oracle(spec, 18, family, ns, {});
    expect_matches_oracle(spec, 18, family, ns, compressed);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, WindowOracle, ::testing::Range(0, 12));

TEST(WindowSearch, CompressedMatchesOnPeriodicBlocks) {
  moran::SearchOptions compressed;
  compressed.exhaustive_limit = 0;
  const moran::MoranSpec mixed{SequenceSpec::blocks({{9, 3}, {5, 2}}, {{16, 1}}),
                               SequenceSpec::blocks({{4, 5}}, {{2, 2}, {8, 1}}), "mixed"};
  const auto ns = powers_of_two({4, 12, 30, 60});
  for (auto family : {WindowFamily::assouad, WindowFamily::lower}) {
    expect_matches_oracle(kCyclic, 60, family, ns, compressed);
    expect_matches_oracle(kExample, 20, family, ns, compressed);
    expect_matches_oracle(mixed, 70, family, ns, compressed);
  }
}

TEST(WindowSearch, LongPeriodicSpecAgreesWithExhaustive) {
  // a short prefix followed by a long cycle: the compressed search must see the
  // same extremum as full enumeration at a depth where that is still cheap
  const moran::MoranSpec spec{SequenceSpec::constant(32), SequenceSpec::blocks({{16, 4}}, {{2, 3}, {16, 1}}), "long"};
  const auto ns = powers_of_two({10, 50, 150});
  moran::SearchOptions compressed;
  compressed.exhaustive_limit = 0;
  for (auto family : {WindowFamily::assouad, WindowFamily::lower}) {
    const moran::JointView view(spec, 400);
    const auto full = moran::search_windows(view, family, ns);
    const auto fast = moran::search_windows(view, family, ns, compressed);
    EXPECT_TRUE(full.exhaustive);
    EXPECT_FALSE(fast.exhaustive);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      EXPECT_EQ(fast.per_threshold[i].witness, full.per_threshold[i].witness);
      EXPECT_EQ(moran::compare_ratios(fast.per_threshold[i].num, fast.per_threshold[i].den, full.per_threshold[i].num,
                                      full.per_threshold[i].den),
                0);
    }
  }
}
