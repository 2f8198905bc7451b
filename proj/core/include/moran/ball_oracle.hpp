#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "moran/sequence.hpp"

namespace moran {

/// Measures at a fixed rank n. `lower` counts the rank-n intervals inside
/// [a, c], `upper` those whose interior meets it, and `approximant` is the
/// mass of [a, c] under the rank-n piecewise-uniform measure.
struct IntervalMeasure {
  mpq_class lower;
  mpq_class upper;
  mpq_class approximant;

  bool resolved() const { return lower == upper; }
};

using DigitPath = std::vector<std::uint64_t>;

IntervalMeasure interval_measure(const MoranSpec& spec, const mpq_class& a, const mpq_class& c, Index rank);

/// Left endpoint of the interval with the given digits (d_k < q_k).
mpq_class point_of(const MoranSpec& spec, const DigitPath& path);

/// Ball B(x, r) clipped to [0, 1], x given by its digit path.
IntervalMeasure ball_measure(const MoranSpec& spec, const DigitPath& x, const mpq_class& r, Index rank);

struct ScalePair {
  mpq_class big;    // R
  mpq_class small;  // r
};

/// Pairs (1/(b_1..b_j), 1/(b_1..b_m)) with 0 <= j, m - j >= min_gap, m <= rank.
std::vector<ScalePair> prefix_scale_grid(const MoranSpec& spec, Index rank, Index min_gap);

/// Uniform random digit paths of length `rank`, reproducible from the seed.
std::vector<DigitPath> random_paths(const MoranSpec& spec, Index rank, std::size_t count, std::uint64_t seed);

struct ExponentWitness {
  DigitPath path;
  mpq_class big;
  mpq_class small;
  long double value = 0;
};

struct EmpiricalExponents {
  long double lower_emp = 0;
  long double assouad_emp = 0;
  ExponentWitness lower_witness;
  ExponentWitness assouad_witness;
};

/// Extremes over samples and scales of log(mu B(x,R) / mu B(x,r)) / log(R/r),
/// using the rank-n approximant.
EmpiricalExponents empirical_exponents(const MoranSpec& spec, Index rank, const std::vector<ScalePair>& scales,
                                       const std::vector<DigitPath>& samples);

}  // namespace moran
