#include "moran/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "moran/error.hpp"
#include "moran/primes.hpp"

namespace moran {
namespace {

constexpr Index kWalkCap = Index{1} << 24;

int valuation(std::uint64_t n, std::uint64_t p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// q | base^e
bool divides_power(std::uint64_t q, std::uint64_t base, Index e) {
  for (const auto& [p, k] : factorize(q)) {
    if (base % p != 0) return false;
    if (Index{k} > checked_mul(e, Index{valuation(base, p)})) return false;
  }
  return true;
}

// base^e | b
bool power_divides(std::uint64_t base, Index e, std::uint64_t b) {
  for (const auto& [p, k] : factorize(base)) {
    if (checked_mul(Index{k}, e) > Index{valuation(b, p)}) return false;
  }
  return true;
}

struct RunCursor {
  const Segment* seg;
  std::vector<Index> starts;

  explicit RunCursor(const Segment* s) : seg(s) {
    Index at = 0;
    for (const Run& r : s->runs()) {
      starts.push_back(at);
      at += r.count;
    }
  }
  // (value, indices left in the run) at offset i
  std::pair<std::uint64_t, Index> at(Index i) const {
    const Index o = floor_mod(i, seg->period());
    const auto it = std::upper_bound(starts.begin(), starts.end(), o) - 1;
    const auto r = static_cast<std::size_t>(it - starts.begin());
    return {seg->runs()[r].value, starts[r] + seg->runs()[r].count - o};
  }
};

struct PieceVerdict {
  std::optional<Index> fail;  // offset inside the piece
  bool complete = true;
};

// len < 0 means the piece runs forever.
PieceVerdict check_piece(const Segment& qs, Index qoff, const Segment& bs, Index boff, Index len) {
  const bool infinite = len < 0;
  using T = Segment::Type;
  if (qs.type() == T::pattern && bs.type() == T::pattern) {
    const Index l = lcm_capped(qs.period(), bs.period(), kWalkCap + 1);
    const Index span = infinite ? l : std::min(len, l);
    const RunCursor cq(&qs), cb(&bs);
    for (Index i = 0; i < std::min(span, kWalkCap);) {
      const auto [qv, rq] = cq.at(qoff + i);
      const auto [bv, rb] = cb.at(boff + i);
      if (bv % qv != 0) return {i, true};
      i += std::min(rq, rb);
    }
    return {std::nullopt, span <= kWalkCap};
  }
  if (qs.type() == T::pattern) {
    // b_n grows, so the first index of every q run decides it
    const Index span = infinite ? qs.period() : std::min(len, qs.period());
    const RunCursor cq(&qs);
    for (Index i = 0; i < span;) {
      const auto [qv, rq] = cq.at(qoff + i);
      if (!divides_power(qv, bs.base(), bs.first_exponent() + boff + i)) return {i, true};
      i += rq;
    }
    return {};
  }
  if (bs.type() == T::pattern) {
    // q_n grows without bound against a bounded b: fails within 64 steps
    const RunCursor cb(&bs);
    const Index span = infinite ? Index{128} : std::min(len, Index{128});
    for (Index i = 0; i < span; ++i) {
      if (!power_divides(qs.base(), qs.first_exponent() + qoff + i, cb.at(boff + i).first)) return {i, true};
    }
    return {std::nullopt, !infinite && len <= 128};
  }
  // a^(e1 + i) | c^(e2 + i): per prime, v_a (e1 + i) <= v_c (e2 + i), linear in i
  const Index e1 = qs.first_exponent() + qoff, e2 = bs.first_exponent() + boff;
  std::optional<Index> first;
  for (const auto& [p, k] : factorize(qs.base())) {
    const Index va = k, vc = valuation(bs.base(), p);
    const Index slack = checked_mul(vc, e2) - checked_mul(va, e1);  // at i = 0
    Index f;
    if (slack < 0) {
      f = 0;
    } else if (va > vc) {
      f = slack / (va - vc) + 1;
    } else {
      continue;
    }
    if (!first || f < *first) first = f;
  }
  if (first && (infinite || *first < len)) return {first, true};
  return {};
}

struct ScanVerdict {
  std::optional<Index> fail;
  bool complete = true;
};

ScanVerdict scan(const MoranSpec& spec, Index a, Index c) {
  ScanVerdict out;
  if (a > c) return out;
  const auto qp = spec.q.pieces(a, c), bp = spec.b.pieces(a, c);
  std::size_t i = 0, j = 0;
  Index at = a;
  while (at <= c) {
    while (qp[i].start + qp[i].length <= at) ++i;
    while (bp[j].start + bp[j].length <= at) ++j;
    const Index end = std::min(qp[i].start + qp[i].length, bp[j].start + bp[j].length);
    const PieceVerdict v = check_piece(*qp[i].segment, qp[i].offset + (at - qp[i].start), *bp[j].segment,
                                       bp[j].offset + (at - bp[j].start), end - at);
    if (v.fail) return {at + *v.fail, true};
    out.complete = out.complete && v.complete;
    at = end;
  }
  return out;
}

std::complex<long double> unit_phase(const mpq_class& x) {
  // e^{-2 pi i x}, x reduced mod 1 exactly
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  mpq_class f = x - fl;
  f.canonicalize();
  if (f == 0) return {1, 0};
  if (f.get_den() == 2) return {-1, 0};
  if (f.get_den() == 4) return f.get_num() == 1 ? std::complex<long double>{0, -1} : std::complex<long double>{0, 1};
  const long double t = 2 * std::numbers::pi_v<long double> * (mpz_get_d(f.get_num_mpz_t()) /
                                                               static_cast<long double>(mpz_get_d(f.get_den_mpz_t())));
  return {std::cos(t), -std::sin(t)};
}

std::size_t level_size(const MoranSpec& spec, int level) {
  if (level < 1) throw Error(ErrorCode::invalid_argument, "level must be >= 1");
  if (const auto h = spec.horizon(); h && level > *h) throw Error(ErrorCode::out_of_horizon, "level beyond horizon");
  mpz_class total = 1;
  for (int k = 1; k <= level; ++k) {
    total *= spec.q.term(k);
    if (total > kMaxLevelAtoms) throw Error(ErrorCode::invalid_argument, "level has too many atoms to enumerate");
  }
  return total.get_ui();
}

}  // namespace

AnHeReport anhe_condition(const MoranSpec& spec, Index depth) {
  AnHeReport r;
  const auto& qt = spec.q.tail();
  const auto& bt = spec.b.tail();
  if (qt && bt) {
    const Index t = std::max(spec.q.tail_start(), spec.b.tail_start());
    const ScanVerdict head = scan(spec, 1, t - 1);
    if (head.fail) {
      r.first_violation = head.fail;
      r.checked_through = *head.fail;
      r.certified_all_n = true;
      return r;
    }
    const PieceVerdict tail =
        check_piece(*qt, t - spec.q.tail_start(), *bt, t - spec.b.tail_start(), Index{-1});
    if (tail.fail) {
      r.first_violation = t + *tail.fail;
      r.checked_through = *r.first_violation;
      r.certified_all_n = true;
      return r;
    }
    if (head.complete && tail.complete) {
      r.holds = true;
      r.certified_all_n = true;
      return r;
    }
  }
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "depth must be >= 1");
  Index end = depth;
  const auto h = spec.horizon();
  if (h) end = std::min(end, *h);
  const ScanVerdict v = scan(spec, 1, end);
  r.first_violation = v.fail;
  r.holds = !v.fail;
  r.checked_through = v.fail ? *v.fail : end;
  // a finite layout checked to its horizon is settled as well
  r.certified_all_n = v.fail.has_value() || (h && end == *h && v.complete);
  return r;
}

CandidateSpectrum candidate_spectrum(const MoranSpec& spec, int level) {
  level_size(spec, level);
  CandidateSpectrum out;
  out.level = level;
  out.elements = {mpq_class(0)};
  mpz_class prod = 1;
  for (int k = 1; k <= level; ++k) {
    const mpz_class q = spec.q.term(k), b = spec.b.term(k);
    if (b % q != 0) {
      throw Error(ErrorCode::divisibility, "q_" + std::to_string(k) + " does not divide b_" + std::to_string(k));
    }
    prod *= b;
    const mpz_class mult = prod / q;
    out.multipliers.push_back(mult);
    std::vector<mpq_class> next;
    next.reserve(out.elements.size() * q.get_ui());
    for (const auto& e : out.elements) {
      for (unsigned long j = 0; j < q.get_ui(); ++j) next.push_back(e + mpq_class(mult * j));
    }
    out.elements = std::move(next);
  }
  std::sort(out.elements.begin(), out.elements.end());
  return out;
}

LevelMeasure level_measure(const MoranSpec& spec, int level) {
  const std::size_t m = level_size(spec, level);
  LevelMeasure out;
  out.level = level;
  out.atoms = {mpq_class(0)};
  mpz_class prod = 1;
  for (int k = 1; k <= level; ++k) {
    const unsigned long q = spec.q.term(k).get_ui();
    prod *= spec.b.term(k);
    std::vector<mpq_class> next;
    next.reserve(out.atoms.size() * q);
    for (const auto& a : out.atoms) {
      for (unsigned long d = 0; d < q; ++d) {
        mpq_class x = a + mpq_class(mpz_class(d), prod);
        x.canonicalize();
        next.push_back(x);
      }
    }
    out.atoms = std::move(next);
  }
  out.weight = mpq_class(1, static_cast<unsigned long>(m));
  return out;
}

std::complex<long double> gram_entry(const mpq_class& l1, const mpq_class& l2, const LevelMeasure& measure) {
  const mpq_class diff = l1 - l2;
  long double re = 0, im = 0, cre = 0, cim = 0;  // Kahan compensation
  for (const auto& a : measure.atoms) {
    const auto z = unit_phase(diff * a);
    const long double yr = z.real() - cre, yi = z.imag() - cim;
    const long double tr = re + yr, ti = im + yi;
    cre = (tr - re) - yr;
    cim = (ti - im) - yi;
    re = tr;
    im = ti;
  }
  const long double m = static_cast<long double>(measure.atoms.size());
  return {re / m, im / m};
}

OrthonormalityCertificate orthonormality_check(const std::vector<mpq_class>& spectrum, const LevelMeasure& measure,
                                               long double tolerance) {
  if (!(tolerance > 0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (spectrum.size() > measure.atoms.size()) {
    throw Error(ErrorCode::invalid_argument, "spectrum larger than the atom set");
  }
  OrthonormalityCertificate c;
  // Entries depend on the difference only.
  std::map<mpq_class, std::complex<long double>> cache;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    for (std::size_t j = i; j < spectrum.size(); ++j) {
      mpq_class d = spectrum[i] - spectrum[j];
      d.canonicalize();
      auto it = cache.find(d);
      if (it == cache.end()) it = cache.emplace(d, gram_entry(spectrum[i], spectrum[j], measure)).first;
      if (i == j) {
        c.max_diag_deviation = std::max(c.max_diag_deviation, std::abs(it->second - std::complex<long double>(1, 0)));
      } else {
        c.max_offdiag = std::max(c.max_offdiag, std::abs(it->second));
      }
    }
  }
  c.orthonormal = c.max_offdiag < tolerance && c.max_diag_deviation < tolerance;
  c.complete = spectrum.size() == measure.atoms.size();
  c.basis = c.orthonormal && c.complete;
  return c;
}

std::complex<long double> fourier_transform(const MoranSpec& spec, const mpq_class& xi, int level) {
  if (level < 1) throw Error(ErrorCode::invalid_argument, "level must be >= 1");
  if (const auto h = spec.horizon(); h && level > *h) throw Error(ErrorCode::out_of_horizon, "level beyond horizon");
  std::complex<long double> out(1, 0);
  mpz_class prod = 1;
  for (int k = 1; k <= level; ++k) {
    const mpz_class q = spec.q.term(k);
    prod *= spec.b.term(k);
    mpq_class theta(xi.get_num(), xi.get_den() * prod);
    theta.canonicalize();
    const auto step = unit_phase(theta);
    if (step == std::complex<long double>(1, 0)) continue;  // theta integral: every term is 1
    const auto top = unit_phase(theta * mpq_class(q));
    if (top == std::complex<long double>(1, 0)) return {0, 0};
    out *= (std::complex<long double>(1, 0) - top) /
           (static_cast<long double>(q.get_d()) * (std::complex<long double>(1, 0) - step));
  }
  return out;
}

}  // namespace moran
