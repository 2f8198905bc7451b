#pragma once

// Brute-force reference computations, written term by term and independent of
// the compressed code paths they are compared against.

#include <optional>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "moran/ball_oracle.hpp"
#include "moran/log_product.hpp"
#include "moran/sequence.hpp"
#include "moran/window_search.hpp"

namespace oracle {

using moran::Index;
using moran::LogProduct;

struct Extremum {
  bool feasible = false;
  moran::Window witness;
  LogProduct num, den;
};

inline LogProduct q_range(const moran::MoranSpec& s, Index a, Index c) {
  LogProduct out;
  for (Index i = a; i <= c; ++i) out += s.q.log_term(i);
  return out;
}

inline LogProduct b_range(const moran::MoranSpec& s, Index a, Index c) {
  LogProduct out;
  for (Index i = a; i <= c; ++i) out += s.b.log_term(i);
  return out;
}

/// Every window, enumerated; ties keep the smallest k, then the smallest n.
inline Extremum windows(const moran::MoranSpec& s, Index depth, moran::WindowFamily family,
                        const moran::Threshold& n) {
  Extremum best;
  const bool assouad = family == moran::WindowFamily::assouad;
  for (Index k = 1; k <= depth; ++k) {
    for (Index len = assouad ? 0 : 1; k + len <= depth; ++len) {
      LogProduct num, den;
      if (assouad) {
        num = q_range(s, k, k + len);
        den = s.q.log_term(k) + b_range(s, k + 1, k + len);
      } else {
        num = q_range(s, k + 1, k + len - 1);
        den = b_range(s, k + 1, k + len) - s.q.log_term(k + len);
      }
      if (!n.reached_by(den)) continue;
      if (best.feasible) {
        const int c = moran::compare_ratios(num, den, best.num, best.den);
        if (assouad ? c <= 0 : c >= 0) continue;
      }
      best = {true, {k, len}, num, den};
    }
  }
  return best;
}

/// log(q_1..q_n) / log(b_1..b_n) as an exact rational when defined.
inline std::optional<mpq_class> prefix_ratio(const moran::MoranSpec& s, Index n) {
  return moran::exact_ratio(q_range(s, 1, n), b_range(s, 1, n));
}

/// Rank-n intervals listed explicitly; measure of [a, c] counted interval by interval.
inline moran::IntervalMeasure interval_measure(const moran::MoranSpec& s, const mpq_class& a, const mpq_class& c,
                                               Index rank) {
  std::vector<mpq_class> lefts{mpq_class(0)};
  mpz_class scale = 1;
  mpz_class total = 1;
  for (Index k = 1; k <= rank; ++k) {
    const mpz_class q = s.q.term(k);
    scale *= s.b.term(k);
    total *= q;
    std::vector<mpq_class> next;
    for (const auto& l : lefts) {
      for (mpz_class d = 0; d < q; ++d) next.push_back(l + mpq_class(d, scale));
    }
    lefts.swap(next);
  }
  const mpq_class width(1, scale);
  mpz_class inside = 0, meeting = 0;
  mpq_class mass = 0;
  for (auto& l : lefts) {
    l.canonicalize();
    const mpq_class r = l + width;
    if (a <= l && r <= c) inside += 1;
    if (l < c && r > a) meeting += 1;
    const mpq_class lo = l > a ? l : a, hi = r < c ? r : c;
    if (hi > lo) mass += (hi - lo) / width;
  }
  moran::IntervalMeasure m;
  m.lower = mpq_class(inside, total);
  m.upper = mpq_class(meeting, total);
  m.approximant = mass / mpq_class(total);
  m.lower.canonicalize();
  m.upper.canonicalize();
  m.approximant.canonicalize();
  return m;
}

/// Random bounded spec with 2 <= q_n < b_n <= max_b over `length` explicit terms.
inline moran::MoranSpec random_spec(std::mt19937_64& rng, Index length, std::uint64_t max_b) {
  std::vector<std::uint64_t> q, b;
  for (Index i = 0; i < length; ++i) {
    const std::uint64_t bi = std::uniform_int_distribution<std::uint64_t>(3, max_b)(rng);
    b.push_back(bi);
    q.push_back(std::uniform_int_distribution<std::uint64_t>(2, bi - 1)(rng));
  }
  return {moran::SequenceSpec::explicit_list(b), moran::SequenceSpec::explicit_list(q), "random"};
}

}  // namespace oracle
