#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "wgl/arith.hpp"
#include "wgl/error.hpp"
#include "wgl/prime_tools.hpp"

using namespace wgl;

namespace {

// Trial division by the primes below 10^5 (enough for n < 10^10).
const std::vector<u64>& small_primes() {
  static const std::vector<u64> table = [] {
    std::vector<u64> out;
    for (u64 d = 2; d < 100000; ++d) {
      bool prime = true;
      for (u64 q : out) {
        if (q * q > d) break;
        if (d % q == 0) {
          prime = false;
          break;
        }
      }
      if (prime) out.push_back(d);
    }
    return out;
  }();
  return table;
}

bool trial_division_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d : small_primes()) {
    if (d * d > n) return true;
    if (n % d == 0) return n == d;
  }
  return true;
}

}  // namespace

TEST_CASE("small windows") {
  CHECK(primes_in_interval(10, 21).primes == std::vector<u64>{11, 13, 17, 19});
  CHECK(primes_in_interval(1, 2).primes.empty());
  CHECK(primes_in_interval(2, 3).primes == std::vector<u64>{2});
  CHECK(primes_in_interval(0, 10).primes == std::vector<u64>{2, 3, 5, 7});
  CHECK(primes_in_interval(20, 20).primes.empty());
  CHECK(primes_in_interval(24, 29).primes.empty());
  CHECK(primes_in_interval(24, 30).primes == std::vector<u64>{29});
}

TEST_CASE("pi(10^6)") {
  auto iv = primes_in_interval(2, 1000001);
  CHECK(iv.primes.size() == 78498);
  // independent sieve
  std::vector<char> comp(1000001, 0);
  u64 count = 0;
  for (u64 i = 2; i <= 1000000; ++i) {
    if (comp[i]) continue;
    ++count;
    for (u64 j = i * i; j <= 1000000; j += i) comp[j] = 1;
  }
  CHECK(count == 78498);
  CHECK(std::is_sorted(iv.primes.begin(), iv.primes.end()));
  CHECK(std::adjacent_find(iv.primes.begin(), iv.primes.end()) == iv.primes.end());
}

TEST_CASE("segmented sieve equals trial division on random windows below 10^10") {
  std::mt19937_64 rng(20240611);
  for (int w = 0; w < 200; ++w) {
    u64 lo = 2 + rng() % 10'000'000'000ULL;
    u64 hi = lo + 10000;
    auto iv = primes_in_interval(lo, hi);
    std::vector<u64> oracle;
    for (u64 n = lo; n < hi; ++n) {
      if (n % 2 == 0 && n != 2) continue;
      if (trial_division_prime(n)) oracle.push_back(n);
    }
    REQUIRE(iv.primes == oracle);
  }
}

TEST_CASE("workers do not change the output") {
  SieveOptions one{1}, four{4};
  auto a = primes_in_interval(1'000'000'000, 1'003'000'000, one);
  auto b = primes_in_interval(1'000'000'000, 1'003'000'000, four);
  CHECK(a.primes == b.primes);
}

TEST_CASE("primes in residue classes") {
  PrimeInterval small{10, 21, {11, 13, 17, 19}};
  CHECK(count_primes_in_ap(small, 4, 1) == 2);
  CHECK(count_primes_in_ap(small, 1, 1) == 4);

  auto iv = primes_in_interval(1'000'000, 1'010'000);
  u64 oracle = 0;
  for (u64 n = 1'000'000; n < 1'010'000; ++n) oracle += (n % 3 == 1 && trial_division_prime(n));
  CHECK(count_primes_in_ap(iv, 3, 1) == oracle);

  // partition over residues coprime to d
  for (u64 d : {3u, 4u, 10u, 12u, 30u}) {
    u64 total = 0, coprime = 0;
    for (u64 c = 0; c < d; ++c) {
      if (std::gcd(c, d) == 1) total += count_primes_in_ap(iv, d, c);
    }
    for (u64 p : iv.primes) coprime += std::gcd(p, d) == 1;
    CHECK(total == coprime);
  }
}

TEST_CASE("density check at 10^8") {
  auto r = check_density_lower_bound(1e8, 0.7, 0.01, 1, 1, 0.99);
  u64 length = static_cast<u64>(std::floor(std::pow(1e8, 0.69)));
  CHECK(r.interval.lo == 100000000);
  CHECK(r.interval.hi == 100000000 + length);
  u64 oracle = 0;
  for (u64 n = r.interval.lo; n < r.interval.hi; ++n) oracle += trial_division_prime(n);
  CHECK(r.prime_count == oracle);
  CHECK(r.observed_ratio == doctest::Approx(oracle * std::log(1e8) / length));
  CHECK(r.pass == (r.observed_ratio >= 0.99));

  auto r3 = check_density_lower_bound(1e8, 0.7, 0.01, 3, 2, 0.99);
  u64 oracle3 = 0;
  for (u64 p : r.interval.primes) oracle3 += p % 3 == 2;
  CHECK(r3.prime_count == oracle3);
  CHECK(r3.observed_ratio == doctest::Approx(oracle3 * 2.0 * std::log(1e8) / length));
  CHECK(r3.observed_ratio >= 0);

  try {
    check_density_lower_bound(1e8, 0.7, 0.01, 4, 2, 0.99);
    FAIL("expected a coprimality error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::coprimality);
  }
  CHECK_THROWS_AS(check_density_lower_bound(1e8, 0.4, 0.01, 1, 1, 0.99), Error);
  CHECK_THROWS_AS(check_density_lower_bound(1e8, 0.7, 0.01, 100, 1, 0.99), Error);
}

TEST_CASE("budget and range errors") {
  SieveOptions tiny{1, 1024};
  try {
    primes_in_interval(2, 100'000'000, tiny);
    FAIL("expected a resource error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::resource);
  }
  CHECK_THROWS_AS(primes_in_interval(2, (u64{1} << 62) + 1), Error);
}
