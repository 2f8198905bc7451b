#include "moran/int128.hpp"

#include <algorithm>

#include "moran/error.hpp"

namespace moran {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_horizon: return "out_of_horizon";
    case ErrorCode::invalid_spec: return "invalid_spec";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::no_feasible_window: return "no_feasible_window";
    case ErrorCode::unbounded_sequence: return "unbounded_sequence";
    case ErrorCode::no_parameters: return "no_parameters";
    case ErrorCode::divisibility: return "divisibility";
    case ErrorCode::horizon_limited: return "horizon_limited";
    case ErrorCode::parse_error: return "parse_error";
  }
  return "unknown";
}

std::string to_string(__int128 value) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  unsigned __int128 mag = negative ? -static_cast<unsigned __int128>(value)
                                   : static_cast<unsigned __int128>(value);
  std::string out;
  while (mag > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  if (negative) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

__int128 parse_int128(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::parse_error, "empty integer literal");
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) throw Error(ErrorCode::parse_error, "malformed integer '" + std::string(text) + "'");
  __int128 value = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::parse_error, "malformed integer '" + std::string(text) + "'");
    }
    value = checked_add(checked_mul(value, 10), c - '0');
  }
  return negative ? -value : value;
}

mpz_class to_mpz(__int128 value) {
  const bool negative = value < 0;
  unsigned __int128 mag = negative ? -static_cast<unsigned __int128>(value)
                                   : static_cast<unsigned __int128>(value);
  mpz_class hi = static_cast<unsigned long>(static_cast<std::uint64_t>(mag >> 64));
  mpz_class lo = static_cast<unsigned long>(static_cast<std::uint64_t>(mag));
  mpz_class out = (hi << 64) + lo;
  return negative ? mpz_class(-out) : out;
}

__int128 to_int128(const mpz_class& value) {
  if (mpz_sizeinbase(value.get_mpz_t(), 2) > 126) {
    throw Error(ErrorCode::overflow, "integer exceeds the 128-bit range");
  }
  mpz_class mag = abs(value);
  mpz_class lo = mag & mpz_class("18446744073709551615");
  mpz_class hi = mag >> 64;
  unsigned __int128 out = (static_cast<unsigned __int128>(hi.get_ui()) << 64) | lo.get_ui();
  return sgn(value) < 0 ? -static_cast<__int128>(out) : static_cast<__int128>(out);
}

__int128 checked_add(__int128 a, __int128 b) {
  __int128 out;
  if (__builtin_add_overflow(a, b, &out)) throw Error(ErrorCode::overflow, "128-bit addition overflow");
  return out;
}

__int128 checked_sub(__int128 a, __int128 b) {
  __int128 out;
  if (__builtin_sub_overflow(a, b, &out)) throw Error(ErrorCode::overflow, "128-bit subtraction overflow");
  return out;
}

__int128 checked_mul(__int128 a, __int128 b) {
  __int128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw Error(ErrorCode::overflow, "128-bit multiplication overflow");
  return out;
}

__int128 isqrt(__int128 n) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "isqrt of a negative number");
  mpz_class root;
  mpz_class z = to_mpz(n);
  mpz_sqrt(root.get_mpz_t(), z.get_mpz_t());
  return to_int128(root);
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

__int128 lcm_capped(__int128 a, __int128 b, __int128 cap) {
  const __int128 g = gcd128(a, b);
  const __int128 step = a / g;
  __int128 out;
  if (__builtin_mul_overflow(step, b, &out) || out > cap) return cap;
  return out;
}

}  // namespace moran
