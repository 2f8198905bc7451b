#include "moran/ball_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "moran/error.hpp"

namespace moran {
namespace {

struct Levels {
  std::vector<mpz_class> b, q;
  std::vector<mpz_class> q_after;  // q_{k+1}...q_n, indexed by k = 0..n
  mpz_class q_total;
};

Levels levels_of(const MoranSpec& spec, Index rank) {
  if (rank < 1) throw Error(ErrorCode::invalid_argument, "rank must be >= 1");
  if (const auto h = spec.horizon(); h && rank > *h) {
    throw Error(ErrorCode::out_of_horizon, "rank " + to_string(rank) + " beyond horizon " + to_string(*h));
  }
  if (rank > 4096) throw Error(ErrorCode::invalid_argument, "rank too large for exact interval arithmetic");
  Levels lv;
  const auto n = static_cast<std::size_t>(rank);
  for (std::size_t k = 1; k <= n; ++k) {
    lv.b.push_back(spec.b.term(static_cast<Index>(k)));
    lv.q.push_back(spec.q.term(static_cast<Index>(k)));
  }
  lv.q_after.assign(n + 1, mpz_class(1));
  for (std::size_t k = n; k-- > 0;) lv.q_after[k] = lv.q_after[k + 1] * lv.q[k];
  lv.q_total = lv.q_after[0];
  return lv;
}

struct Counts {
  mpz_class left_lt;   // rank-n intervals with left endpoint < x
  mpz_class right_le;  // rank-n intervals with right endpoint <= x
  mpq_class cdf;       // approximant mass of [0, x]
};

Counts count_at(const Levels& lv, const mpq_class& x) {
  Counts out;
  const std::size_t n = lv.b.size();
  mpq_class y = x * mpq_class(lv.b[0]);
  for (std::size_t k = 0; k < n; ++k) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    const bool integral = y.get_den() == 1;
    if (fl < 0) break;
    const mpz_class full = std::min(fl, lv.q[k]);
    const mpq_class unit(lv.q_after[k + 1], lv.q_total);  // mass of one child
    out.cdf += unit * full;
    if (k + 1 == n) {
      mpz_class ceil = integral ? fl : fl + 1;
      out.left_lt += std::min(ceil, lv.q[k]);
      out.right_le += full;
      if (!integral && fl < lv.q[k]) out.cdf += unit * (y - fl);
      break;
    }
    out.left_lt += full * lv.q_after[k + 1];
    out.right_le += full * lv.q_after[k + 1];
    if (integral || fl >= lv.q[k]) break;
    y = (y - fl) * mpq_class(lv.b[k + 1]);
  }
  out.cdf.canonicalize();
  return out;
}

long double log2_of(const mpq_class& v) {
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, v.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, v.get_den_mpz_t());
  return std::log2(static_cast<long double>(mn)) - std::log2(static_cast<long double>(md)) +
         static_cast<long double>(en - ed);
}

}  // namespace

IntervalMeasure interval_measure(const MoranSpec& spec, const mpq_class& a, const mpq_class& c, Index rank) {
  if (a > c) throw Error(ErrorCode::invalid_argument, "interval endpoints must satisfy a <= c");
  if (a < 0 || c > 1) throw Error(ErrorCode::invalid_argument, "interval must lie in [0, 1]");
  const Levels lv = levels_of(spec, rank);
  const Counts ca = count_at(lv, a), cc = count_at(lv, c);
  IntervalMeasure m;
  const mpz_class inside = cc.right_le - ca.left_lt;
  const mpz_class meeting = cc.left_lt - ca.right_le;
  m.lower = mpq_class(inside > 0 ? inside : mpz_class(0), lv.q_total);
  m.upper = mpq_class(meeting > 0 ? meeting : mpz_class(0), lv.q_total);
  m.lower.canonicalize();
  m.upper.canonicalize();
  m.approximant = cc.cdf - ca.cdf;
  return m;
}

mpq_class point_of(const MoranSpec& spec, const DigitPath& path) {
  mpq_class x = 0;
  mpz_class scale = 1;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Index idx = static_cast<Index>(k + 1);
    if (mpz_class(static_cast<unsigned long>(path[k])) >= spec.q.term(idx)) {
      throw Error(ErrorCode::invalid_argument, "digit " + std::to_string(path[k]) + " out of range at level " +
                                                   std::to_string(k + 1));
    }
    scale *= spec.b.term(idx);
    x += mpq_class(mpz_class(static_cast<unsigned long>(path[k])), scale);
  }
  x.canonicalize();
  return x;
}

IntervalMeasure ball_measure(const MoranSpec& spec, const DigitPath& x, const mpq_class& r, Index rank) {
  if (r <= 0 || r > 1) throw Error(ErrorCode::invalid_argument, "radius must lie in (0, 1]");
  const mpq_class centre = point_of(spec, x);
  mpq_class a = centre - r, c = centre + r;
  if (a < 0) a = 0;
  if (c > 1) c = 1;
  return interval_measure(spec, a, c, rank);
}

std::vector<ScalePair> prefix_scale_grid(const MoranSpec& spec, Index rank, Index min_gap) {
  if (min_gap < 1) throw Error(ErrorCode::invalid_argument, "scale gap must be >= 1");
  std::vector<mpq_class> radius{mpq_class(1)};
  mpz_class prod = 1;
  for (Index m = 1; m <= rank; ++m) {
    prod *= spec.b.term(m);
    radius.emplace_back(mpz_class(1), prod);
  }
  std::vector<ScalePair> out;
  for (Index j = 0; j <= rank; ++j) {
    for (Index m = j + min_gap; m <= rank; ++m) {
      out.push_back({radius[static_cast<std::size_t>(j)], radius[static_cast<std::size_t>(m)]});
    }
  }
  return out;
}

std::vector<DigitPath> random_paths(const MoranSpec& spec, Index rank, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> qs;
  for (Index k = 1; k <= rank; ++k) {
    const mpz_class t = spec.q.term(k);
    if (!t.fits_ulong_p()) throw Error(ErrorCode::overflow, "q term too large for digit sampling");
    qs.push_back(t.get_ui());
  }
  std::vector<DigitPath> out(count);
  for (auto& path : out) {
    for (std::uint64_t q : qs) path.push_back(std::uniform_int_distribution<std::uint64_t>(0, q - 1)(rng));
  }
  return out;
}

EmpiricalExponents empirical_exponents(const MoranSpec& spec, Index rank, const std::vector<ScalePair>& scales,
                                       const std::vector<DigitPath>& samples) {
  if (scales.empty() || samples.empty()) throw Error(ErrorCode::invalid_argument, "need scales and samples");
  for (const auto& s : scales) {
    if (!(s.big > s.small) || s.small <= 0) throw Error(ErrorCode::invalid_argument, "scale pairs need R > r > 0");
  }
  EmpiricalExponents out;
  bool first = true;
  for (const DigitPath& path : samples) {
    std::map<mpq_class, long double> cache;
    auto log_mass = [&](const mpq_class& r) {
      auto it = cache.find(r);
      if (it != cache.end()) return it->second;
      const mpq_class m = ball_measure(spec, path, r, rank).approximant;
      if (m <= 0) throw Error(ErrorCode::invalid_argument, "ball below rank resolution carries no mass");
      return cache[r] = log2_of(m);
    };
    for (const auto& s : scales) {
      const long double v = (log_mass(s.big) - log_mass(s.small)) / (log2_of(s.big) - log2_of(s.small));
      if (first || v < out.lower_emp) {
        out.lower_emp = v;
        out.lower_witness = {path, s.big, s.small, v};
      }
      if (first || v > out.assouad_emp) {
        out.assouad_emp = v;
        out.assouad_witness = {path, s.big, s.small, v};
      }
      first = false;
    }
  }
  return out;
}

}  // namespace moran
