#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "moran/sequence.hpp"
#include "moran/synthesizer.hpp"

namespace moran {

/// Block order inside every super-block.
enum class Star { H = 0, P = 1, L = 2, A = 3 };
inline constexpr std::array<Star, 4> kStarOrder{Star::H, Star::P, Star::L, Star::A};

const char* to_string(Star star);

/// (t_L, t_H, t_P, t_A), rational.
struct Targets {
  mpq_class lower, hausdorff, packing, assouad;

  const mpq_class& of(Star star) const;
  /// Throws unless 0 <= t_L <= t_H <= t_P <= t_A <= 1.
  void validate() const;
};

/// One triple for all four components: alpha0, alpha1 | beta, log alpha0 / log beta
/// <= smallest positive target, largest target <= log alpha1 / log beta.
/// Search: beta ascending up to the cap, alpha1 descending, alpha0 ascending.
/// With no positive target alpha1 is 0 (unused) and (alpha0, beta) = (2, 4).
SynthParams shared_params(const Targets& targets, std::uint64_t beta_cap = 64);

struct ScheduleBlock {
  Star star;
  int k;
  Index first;  // I_{*,k} = [first, last]
  Index last;

  Index length() const { return last - first + 1; }
};

struct Schedule {
  int super_blocks = 0;
  /// M[star][k - 1] and S[star][k - 1].
  std::array<std::vector<Index>, 4> M;
  std::array<std::vector<Index>, 4> S;
  /// In index order.
  std::vector<ScheduleBlock> blocks;

  Index total() const { return blocks.empty() ? 0 : blocks.back().last; }
  const ScheduleBlock& block(Star star, int k) const;
};

/// Minimal growth: M_{H,1} = 1, M_{P,k} = k M_{H,k}^2, M_{H,k+1} = (k+1) M_{P,k}^2,
/// M_{L,k} = M_{A,k} = floor(sqrt k). Only the minimal schedule exists; K >= 5
/// does not fit 128-bit indices and raises overflow.
Schedule build_schedule(int super_blocks);

/// Conditions (1) and (2) checked as integer relations.
bool schedule_invariants_hold(const Schedule& schedule);

struct Component {
  Star star;
  mpq_class target;
  /// t = 0: q = alpha0, b_j = beta^j.
  bool zero_branch = false;
  /// Symbols of one period of x when periodic.
  std::optional<std::string> period;
  /// q values for the first `max block length` indices (periodic: one period).
  std::vector<Run> q_runs;
};

struct InterleaveResult {
  Targets targets;
  SynthParams params;
  Schedule schedule;
  std::array<Component, 4> components;  // indexed by Star
  MoranSpec spec;
  /// Last super-block [S_{A,K-1} + 1, S_{A,K}], the window for prefix traces.
  Index tail_begin = 1;
};

InterleaveResult interleave(const Targets& targets, const SynthParams& params, int super_blocks = 4);

struct BlockRatio {
  Star star;
  int k;
  long double value;
  std::optional<mpq_class> exact;
};

struct CoverageSample {
  Index first, last;  // J
  long double fraction;
};

struct DensityReport {
  /// log lambda(I_{*,k}) / log lambda([1, S_{*,k}]).
  std::vector<BlockRatio> ratios;
  /// log lambda(I_{A,k}) / log beta <= k, per k (condition (1')).
  std::vector<bool> condition_1prime;
  std::vector<CoverageSample> coverage;
};

/// Sum over blocks I with lambda(I n J) >= R of log lambda(I n J) / log lambda(J).
long double covered_fraction(const MoranSpec& spec, const Schedule& schedule, Index first, Index last,
                             const LogProduct& R);

/// Ratios for every block and coverage over a grid of intervals J (each block,
/// each super-block, each prefix [1, S_{A,k}], and spans straddling block
/// boundaries), with threshold R.
DensityReport density_diagnostics(const InterleaveResult& result, const LogProduct& R = LogProduct::of(2));

}  // namespace moran
