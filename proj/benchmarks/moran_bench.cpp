#include <random>

#include <benchmark/benchmark.h>

#include "moran/dimension.hpp"
#include "moran/interleaver.hpp"
#include "moran/joint_view.hpp"
#include "moran/synthesizer.hpp"
#include "moran/window_search.hpp"

namespace {

moran::MoranSpec random_spec(moran::Index length) {
  std::mt19937_64 rng(7);
  std::vector<std::uint64_t> q, b;
  for (moran::Index i = 0; i < length; ++i) {
    const auto bi = std::uniform_int_distribution<std::uint64_t>(3, 16)(rng);
    b.push_back(bi);
    q.push_back(std::uniform_int_distribution<std::uint64_t>(2, bi - 1)(rng));
  }
  return {moran::SequenceSpec::explicit_list(b), moran::SequenceSpec::explicit_list(q), "bench"};
}

void BM_ExhaustiveAssouad(benchmark::State& state) {
  const auto depth = static_cast<moran::Index>(state.range(0));
  const auto spec = random_spec(depth);
  const moran::JointView view(spec, depth);
  const auto ladder = moran::threshold_ladder(moran::Threshold::power_of(2, 16), 16);
  for (auto _ : state) benchmark::DoNotOptimize(moran::search_windows(view, moran::WindowFamily::assouad, ladder));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExhaustiveAssouad)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_PeriodicDesign(benchmark::State& state) {
  const mpq_class gamma(1, 3);
  const auto params = moran::pick_params(gamma, 256);
  const auto spec = moran::moran_from_sequence(moran::limit_sequence(params, gamma, 4096));
  const auto depth = static_cast<moran::Index>(state.range(0));
  for (auto _ : state) {
    const moran::Threshold n{spec.b.prefix_log(depth), 2};
    benchmark::DoNotOptimize(moran::assouad_estimate(spec, depth, n));
  }
}
BENCHMARK(BM_PeriodicDesign)->Arg(1000)->Arg(100000)->Arg(10000000)->Unit(benchmark::kMillisecond);

void BM_AperiodicDesign(benchmark::State& state) {
  const mpq_class gamma(1, 6);
  const auto params = moran::pick_params(gamma, 256);
  const auto depth = static_cast<moran::Index>(state.range(0));
  const auto spec = moran::moran_from_sequence(moran::limit_sequence(params, gamma, depth));
  for (auto _ : state) {
    const moran::Threshold n{spec.b.prefix_log(depth), 2};
    benchmark::DoNotOptimize(moran::lower_estimate(spec, depth, n));
  }
}
BENCHMARK(BM_AperiodicDesign)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_InterleaveK4(benchmark::State& state) {
  const moran::Targets t{mpq_class(1, 5), mpq_class(2, 5), mpq_class(3, 5), mpq_class(4, 5)};
  for (auto _ : state) {
    const auto res = moran::interleave(t, moran::shared_params(t), 4);
    benchmark::DoNotOptimize(moran::hausdorff_packing_estimate(res.spec, res.schedule.total(), res.tail_begin));
  }
}
BENCHMARK(BM_InterleaveK4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
