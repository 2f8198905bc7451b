#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace moran {

/// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime(std::uint64_t n);

/// Prime factorization as (prime, multiplicity), primes ascending.
/// factorize(1) is empty; factorize(0) throws.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

}  // namespace moran
