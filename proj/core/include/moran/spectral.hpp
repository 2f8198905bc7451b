#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "moran/sequence.hpp"

namespace moran {

struct AnHeReport {
  bool holds = false;
  /// True when the verdict covers every n (decided on the generators of the
  /// layout); otherwise it covers [1, checked_through].
  bool certified_all_n = false;
  Index checked_through = 0;
  std::optional<Index> first_violation;
};

/// q_n | b_n. Infinite periodic or geometric layouts are certified for all n;
/// other layouts are checked on [1, depth].
AnHeReport anhe_condition(const MoranSpec& spec, Index depth);

struct CandidateSpectrum {
  int level = 0;
  /// b_1...b_k / q_k per level.
  std::vector<mpz_class> multipliers;
  std::vector<mpq_class> elements;
};

/// {sum_k (b_1...b_k / q_k) j_k : 0 <= j_k < q_k}; requires q_k | b_k for k <= n.
CandidateSpectrum candidate_spectrum(const MoranSpec& spec, int level);

struct LevelMeasure {
  int level = 0;
  /// Left endpoints of the rank-n intervals, each of weight `weight`.
  std::vector<mpq_class> atoms;
  mpq_class weight;
};

LevelMeasure level_measure(const MoranSpec& spec, int level);

struct OrthonormalityCertificate {
  long double max_offdiag = 0;
  long double max_diag_deviation = 0;
  bool orthonormal = false;
  /// |Lambda| equals the number of atoms.
  bool complete = false;
  bool basis = false;
};

/// Gram matrix G(l, l') = (1/m) sum_a e^{-2 pi i (l - l') a}; the phase is
/// reduced mod 1 exactly before the trigonometric evaluation.
OrthonormalityCertificate orthonormality_check(const std::vector<mpq_class>& spectrum, const LevelMeasure& measure,
                                               long double tolerance = 1e-10L);

/// Gram entry for one pair, as used by orthonormality_check.
std::complex<long double> gram_entry(const mpq_class& l1, const mpq_class& l2, const LevelMeasure& measure);

/// prod_{k <= n} (1/q_k) sum_{d < q_k} e^{-2 pi i d xi / (b_1...b_k)}, each
/// factor as a closed-form geometric sum.
std::complex<long double> fourier_transform(const MoranSpec& spec, const mpq_class& xi, int level);

/// Level cap for exact enumeration: q_1...q_n must not exceed this.
inline constexpr std::size_t kMaxLevelAtoms = std::size_t{1} << 16;

}  // namespace moran
