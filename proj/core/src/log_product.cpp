#include "moran/log_product.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <mpfr.h>

#include "moran/error.hpp"
#include "moran/primes.hpp"

namespace moran {
namespace {

constexpr mpfr_prec_t kStartPrecision = 128;
constexpr mpfr_prec_t kMaxPrecision = 16384;

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

// out = sum_p e_p * ln p
void eval_log_sum(const std::vector<std::pair<std::uint64_t, mpz_class>>& terms, mpfr_prec_t prec, mpfr_ptr out) {
  mpfr_set_zero(out, 1);
  MpfrValue lp(prec);
  for (const auto& [p, e] : terms) {
    mpfr_set_ui(lp.get(), static_cast<unsigned long>(p), MPFR_RNDN);
    mpfr_log(lp.get(), lp.get(), MPFR_RNDN);
    mpfr_mul_z(lp.get(), lp.get(), e.get_mpz_t(), MPFR_RNDN);
    mpfr_add(out, out, lp.get(), MPFR_RNDN);
  }
}

std::vector<std::pair<std::uint64_t, mpz_class>> to_mpz_terms(const LogProduct& x) {
  std::vector<std::pair<std::uint64_t, mpz_class>> out;
  out.reserve(x.factors().size());
  for (const auto& [p, e] : x.factors()) out.emplace_back(p, to_mpz(e));
  return out;
}

// Magnitude bound sum |e_p| log2 p, used to scale rounding errors.
long double abs_log2(const LogProduct& x) {
  long double s = 0;
  for (const auto& [p, e] : x.factors()) s += std::fabs(static_cast<long double>(e)) * std::log2(static_cast<long double>(p));
  return s;
}

}  // namespace

LogProduct LogProduct::of(std::uint64_t value, Exponent multiplicity) {
  if (value == 0) throw Error(ErrorCode::invalid_argument, "log of zero");
  std::vector<Factor> f;
  for (const auto& [p, m] : factorize(value)) f.emplace_back(p, checked_mul(static_cast<Exponent>(m), multiplicity));
  return from_factors(std::move(f));
}

LogProduct LogProduct::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
  LogProduct out;
  for (const auto& [p, e] : factors) {
    if (!out.factors_.empty() && out.factors_.back().first == p) {
      out.factors_.back().second = checked_add(out.factors_.back().second, e);
    } else {
      out.factors_.emplace_back(p, e);
    }
  }
  std::erase_if(out.factors_, [](const Factor& f) { return f.second == 0; });
  out.refresh();
  return out;
}

Exponent LogProduct::exponent_of(std::uint64_t prime) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), prime,
                             [](const Factor& f, std::uint64_t p) { return f.first < p; });
  return (it != factors_.end() && it->first == prime) ? it->second : 0;
}

LogProduct& LogProduct::operator+=(const LogProduct& other) {
  std::vector<Factor> merged;
  merged.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      const Exponent e = checked_add(a->second, b->second);
      if (e != 0) merged.emplace_back(a->first, e);
      ++a;
      ++b;
    }
  }
  factors_ = std::move(merged);
  refresh();
  return *this;
}

LogProduct& LogProduct::operator-=(const LogProduct& other) { return *this += other.scaled(-1); }

LogProduct LogProduct::scaled(Exponent k) const {
  LogProduct out;
  if (k == 0) return out;
  out.factors_ = factors_;
  for (auto& f : out.factors_) f.second = checked_mul(f.second, k);
  out.refresh();
  return out;
}

std::string LogProduct::to_string() const {
  if (factors_.empty()) return "1";
  std::string s;
  for (const auto& [p, e] : factors_) {
    if (!s.empty()) s += "*";
    s += std::to_string(p);
    if (e != 1) s += "^" + moran::to_string(e);
  }
  return s;
}

void LogProduct::refresh() {
  long double s = 0;
  for (const auto& [p, e] : factors_) s += static_cast<long double>(e) * std::log2(static_cast<long double>(p));
  log2_ = s;
}

int sign_of_log_sum(const std::vector<std::pair<std::uint64_t, mpz_class>>& terms) {
  bool all_zero = true;
  long double approx = 0, scale = 0;
  for (const auto& [p, e] : terms) {
    if (sgn(e) != 0) all_zero = false;
    const long double lp = std::log2(static_cast<long double>(p));
    approx += static_cast<long double>(e.get_d()) * lp;
    scale += std::fabs(static_cast<long double>(e.get_d())) * lp;
  }
  // Unique factorization: a nonzero exponent vector never has log 0.
  if (all_zero) return 0;
  if (std::fabs(approx) > scale * 1e-12L) return approx > 0 ? 1 : -1;
  for (mpfr_prec_t prec = kStartPrecision; prec <= kMaxPrecision; prec *= 2) {
    MpfrValue v(prec);
    eval_log_sum(terms, prec, v.get());
    MpfrValue bound(prec);
    mpfr_set_ld(bound.get(), scale, MPFR_RNDU);
    mpfr_mul_2si(bound.get(), bound.get(), -(prec - 16), MPFR_RNDU);
    if (mpfr_cmpabs(v.get(), bound.get()) > 0) return mpfr_sgn(v.get()) > 0 ? 1 : -1;
  }
  throw Error(ErrorCode::overflow, "log-sum sign undecided at maximum precision");
}

int sign(const LogProduct& x) {
  if (x.is_zero()) return 0;
  const long double scale = abs_log2(x);
  if (std::fabs(x.log2()) > scale * 1e-15L) return x.log2() > 0 ? 1 : -1;
  return sign_of_log_sum(to_mpz_terms(x));
}

int compare(const LogProduct& a, const LogProduct& b) { return sign(a - b); }

int compare_ratios(const LogProduct& n1, const LogProduct& d1, const LogProduct& n2, const LogProduct& d2) {
  // sign(n1/d1 - n2/d2) = sign(n1*d2 - n2*d1) with d1, d2 > 0.
  const long double a = n1.log2(), b = d1.log2(), c = n2.log2(), d = d2.log2();
  const long double diff = a * d - c * b;
  const long double scale = abs_log2(n1) * abs_log2(d2) + abs_log2(n2) * abs_log2(d1);
  if (std::fabs(diff) > scale * 1e-15L) return diff > 0 ? 1 : -1;

  // Exact polynomial identity test on coefficients of log p * log p'.
  std::map<std::pair<std::uint64_t, std::uint64_t>, mpz_class> poly;
  auto accumulate = [&](const LogProduct& x, const LogProduct& y, int s) {
    for (const auto& [p, e] : x.factors()) {
      for (const auto& [q, f] : y.factors()) {
        auto key = p < q ? std::make_pair(p, q) : std::make_pair(q, p);
        poly[key] += to_mpz(e) * to_mpz(f) * s;
      }
    }
  };
  accumulate(n1, d2, 1);
  accumulate(n2, d1, -1);
  if (std::all_of(poly.begin(), poly.end(), [](const auto& kv) { return sgn(kv.second) == 0; })) return 0;

  const auto t_n1 = to_mpz_terms(n1), t_d1 = to_mpz_terms(d1), t_n2 = to_mpz_terms(n2), t_d2 = to_mpz_terms(d2);
  for (mpfr_prec_t prec = kStartPrecision; prec <= kMaxPrecision; prec *= 2) {
    MpfrValue va(prec), vb(prec), vc(prec), vd(prec), lhs(prec), rhs(prec), bound(prec);
    eval_log_sum(t_n1, prec, va.get());
    eval_log_sum(t_d1, prec, vb.get());
    eval_log_sum(t_n2, prec, vc.get());
    eval_log_sum(t_d2, prec, vd.get());
    mpfr_mul(lhs.get(), va.get(), vd.get(), MPFR_RNDN);
    mpfr_mul(rhs.get(), vc.get(), vb.get(), MPFR_RNDN);
    mpfr_sub(lhs.get(), lhs.get(), rhs.get(), MPFR_RNDN);
    mpfr_set_ld(bound.get(), scale, MPFR_RNDU);
    mpfr_mul_2si(bound.get(), bound.get(), -(prec - 24), MPFR_RNDU);
    if (mpfr_cmpabs(lhs.get(), bound.get()) > 0) return mpfr_sgn(lhs.get()) > 0 ? 1 : -1;
  }
  // Not a polynomial identity yet numerically zero at 16k bits: treat as tie.
  return 0;
}

std::optional<mpq_class> exact_ratio(const LogProduct& num, const LogProduct& den) {
  if (den.is_zero()) return std::nullopt;
  if (num.is_zero()) return mpq_class(0);
  if (num.factors().size() != den.factors().size()) return std::nullopt;
  std::optional<mpq_class> ratio;
  for (std::size_t i = 0; i < num.factors().size(); ++i) {
    if (num.factors()[i].first != den.factors()[i].first) return std::nullopt;
    mpq_class r(to_mpz(num.factors()[i].second), to_mpz(den.factors()[i].second));
    r.canonicalize();
    if (ratio && *ratio != r) return std::nullopt;
    ratio = r;
  }
  return ratio;
}

bool Threshold::reached_by(const LogProduct& x) const { return compare(x.scaled(root), power) >= 0; }

std::string Threshold::to_string() const {
  if (root == 1) return power.to_string();
  return "(" + power.to_string() + ")^(1/" + moran::to_string(root) + ")";
}

int compare(const Threshold& a, const Threshold& b) {
  return compare(a.power.scaled(b.root), b.power.scaled(a.root));
}

}  // namespace moran
