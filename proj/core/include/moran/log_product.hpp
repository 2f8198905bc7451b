#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "moran/int128.hpp"

namespace moran {

/// Exact logarithm of a product of positive integers, kept as a prime
/// factorization ledger. The cached log2 value is recomputed from the ledger
/// after every update, so it never depends on merge order.
class LogProduct {
 public:
  using Factor = std::pair<std::uint64_t, Exponent>;

  LogProduct() = default;

  /// log(value^multiplicity).
  static LogProduct of(std::uint64_t value, Exponent multiplicity = 1);
  /// Accepts unsorted, repeated or zero entries; primes are not re-checked.
  static LogProduct from_factors(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  bool is_zero() const noexcept { return factors_.empty(); }
  long double log2() const noexcept { return log2_; }
  Exponent exponent_of(std::uint64_t prime) const;

  LogProduct& operator+=(const LogProduct& other);
  LogProduct& operator-=(const LogProduct& other);
  LogProduct scaled(Exponent k) const;

  friend LogProduct operator+(LogProduct a, const LogProduct& b) { return a += b; }
  friend LogProduct operator-(LogProduct a, const LogProduct& b) { return a -= b; }
  friend bool operator==(const LogProduct& a, const LogProduct& b) { return a.factors_ == b.factors_; }

  /// "2^5*3^2", or "1" for the empty product.
  std::string to_string() const;

 private:
  void refresh();

  std::vector<Factor> factors_;
  long double log2_ = 0.0L;
};

/// Exact sign of log(x): 0 iff the ledger is empty.
int sign(const LogProduct& x);
/// Exact sign of log(a) - log(b).
int compare(const LogProduct& a, const LogProduct& b);

/// Exact three-way comparison of log(n1)/log(d1) against log(n2)/log(d2);
/// both denominators must have positive logarithm. Equality is decided as a
/// polynomial identity in the logarithms of the primes.
int compare_ratios(const LogProduct& n1, const LogProduct& d1, const LogProduct& n2, const LogProduct& d2);

/// log(num)/log(den) as an exact rational when the two ledgers are
/// proportional (always the case when a single prime is involved).
std::optional<mpq_class> exact_ratio(const LogProduct& num, const LogProduct& den);

/// Sign of sum_p e_p log p with arbitrary-size exponents.
int sign_of_log_sum(const std::vector<std::pair<std::uint64_t, mpz_class>>& terms);

/// A positive real threshold N given exactly as N = P^(1/root), P an integer
/// product. Window feasibility tests compare root*log(x) with log(P).
struct Threshold {
  LogProduct power;
  Exponent root = 1;

  static Threshold integer(std::uint64_t n) { return {LogProduct::of(n), 1}; }
  static Threshold power_of(std::uint64_t base, Exponent exponent) { return {LogProduct::of(base, exponent), 1}; }

  long double log2() const { return power.log2() / static_cast<long double>(root); }
  /// log(x) >= log(N), decided exactly.
  bool reached_by(const LogProduct& x) const;
  std::string to_string() const;
};

/// Orders thresholds by value, exactly.
int compare(const Threshold& a, const Threshold& b);

}  // namespace moran
