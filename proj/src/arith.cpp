#include "wgl/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wgl/error.hpp"

namespace wgl {

u64 powmod(u64 base, u64 exp, u64 mod) {
  if (mod == 1) return 0;
  u64 result = 1;
  base %= mod;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, mod);
    base = mulmod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

namespace {

bool miller_rabin_witness(u64 n, u64 d, int r, u64 a) {
  a %= n;
  if (a == 0) return true;
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < r; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : small) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This base set is deterministic below 3.3 * 10^24.
  for (u64 a : small) {
    if (!miller_rabin_witness(n, d, r, a)) return false;
  }
  return true;
}

std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<std::pair<u64, int>> out;
  if (n < 2) return out;
  auto strip = [&](u64 p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  };
  strip(2);
  strip(3);
  for (u64 p = 5; p <= n / p; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

u64 euler_phi(u64 n) {
  if (n == 0) return 0;
  u64 phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

u64 checked_mul(u64 a, u64 b) {
  u64 out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(Errc::overflow, "64-bit product overflow");
  }
  return out;
}

u64 checked_pow(u64 base, unsigned exp) {
  u64 r = 1;
  for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

u128 checked_mul128(u128 a, u128 b) {
  u128 out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(Errc::overflow, "128-bit product overflow");
  }
  return out;
}

namespace {

// true iff r^k <= v, without overflowing.
bool pow_le(u64 r, unsigned k, u64 v) {
  u128 acc = 1;
  for (unsigned i = 0; i < k; ++i) {
    acc *= r;
    if (acc > v) return false;
  }
  return true;
}

}  // namespace

u64 iroot(u64 v, unsigned k) {
  if (k == 0) throw Error(Errc::precondition, "iroot: k must be positive");
  if (k == 1 || v < 2) return v;
  auto guess = static_cast<u64>(std::pow(static_cast<long double>(v), 1.0L / k));
  u64 r = std::max<u64>(guess, 1);
  // Newton steps from above until monotone, then fix up exactly.
  for (int it = 0; it < 4; ++it) {
    if (!pow_le(r, k, v)) {
      u128 rk1 = 1;
      for (unsigned i = 0; i + 1 < k; ++i) rk1 *= r;
      u128 next = ((static_cast<u128>(k - 1) * r) + v / rk1) / k;
      if (next >= r) break;
      r = static_cast<u64>(next);
    } else {
      break;
    }
  }
  while (!pow_le(r, k, v)) --r;
  while (pow_le(r + 1, k, v)) ++r;
  return r;
}

std::vector<u64> primes_up_to(u64 limit) {
  std::vector<u64> primes;
  if (limit < 2) return primes;
  std::vector<char> composite(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (u64 j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return primes;
}

std::string to_decimal(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace wgl
