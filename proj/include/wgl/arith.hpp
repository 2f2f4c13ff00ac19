#pragma once

// Word-size integer helpers shared by every module. All modular products go
// through 128-bit intermediates.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wgl {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Moduli handled by the congruence code must stay below this bound.
inline constexpr u64 kModulusLimit = u64{1} << 40;

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 mod);

// Deterministic Miller-Rabin for all 64-bit inputs.
bool is_prime(u64 n);

// Trial division; intended for n < 2^40 or so.
std::vector<std::pair<u64, int>> factorize(u64 n);

u64 euler_phi(u64 n);

// Throws Errc::overflow when the result does not fit.
u64 checked_mul(u64 a, u64 b);
u64 checked_pow(u64 base, unsigned exp);
u128 checked_mul128(u128 a, u128 b);

// floor(v^(1/k)) via integer Newton iteration, verified exactly.
u64 iroot(u64 v, unsigned k);

// Sieve of Eratosthenes up to and including `limit`.
std::vector<u64> primes_up_to(u64 limit);

std::string to_decimal(u128 v);

}  // namespace wgl
