#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace moran {

// Indices and exponent counts. The minimal interleaving schedule with four
// super-blocks already spans ~1e22 indices, past the int64 range.
using Index = __int128;
using Exponent = __int128;

inline constexpr Index kIndexMax = static_cast<Index>(~static_cast<unsigned __int128>(0) >> 1);

std::string to_string(__int128 value);
__int128 parse_int128(std::string_view text);

mpz_class to_mpz(__int128 value);
/// Throws ErrorCode::overflow when the value does not fit.
__int128 to_int128(const mpz_class& value);

__int128 checked_add(__int128 a, __int128 b);
__int128 checked_sub(__int128 a, __int128 b);
__int128 checked_mul(__int128 a, __int128 b);

/// floor(sqrt(n)) for n >= 0.
__int128 isqrt(__int128 n);

/// Floor division for a possibly negative numerator and positive divisor.
inline __int128 floor_div(__int128 a, __int128 b) {
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline __int128 floor_mod(__int128 a, __int128 b) { return a - floor_div(a, b) * b; }

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
__int128 gcd128(__int128 a, __int128 b);
/// lcm, saturating at `cap` (returns cap when the true lcm exceeds it).
__int128 lcm_capped(__int128 a, __int128 b, __int128 cap);

}  // namespace moran
