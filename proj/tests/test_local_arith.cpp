#include "doctest.h"

#include <numeric>
#include <vector>

#include "wgl/arith.hpp"
#include "wgl/error.hpp"
#include "wgl/local_arith.hpp"

using namespace wgl;

namespace {

// Brute force: ordered s-tuples of units mod h with sum of k-th powers = m.
// Straight nested enumeration through an explicit odometer.
u64 brute_count(u64 h, u64 m, int k, int s) {
  std::vector<u64> units;
  for (u64 y = 0; y < h; ++y) {
    if (std::gcd(y, h) == 1) units.push_back(y);
  }
  if (h == 1) units = {0};
  std::vector<u64> pw;
  for (u64 y : units) {
    u64 v = 1;
    for (int i = 0; i < k; ++i) v = v * y % h;
    pw.push_back(v % h);
  }
  std::vector<std::size_t> idx(s, 0);
  u64 count = 0;
  while (true) {
    u64 sum = 0;
    for (auto i : idx) sum += pw[i];
    if (sum % h == m % h) ++count;
    int pos = 0;
    while (pos < s && ++idx[pos] == pw.size()) idx[pos++] = 0;
    if (pos == s) break;
  }
  return count;
}

// Histogram convolution oracle, independent of the library's lifting.
std::vector<u64> convolution_oracle(u64 q, int k, int s) {
  std::vector<u64> one(q, 0);
  for (u64 y = 1; y < q; ++y) {
    if (std::gcd(y, q) != 1) continue;
    u64 v = 1;
    for (int i = 0; i < k; ++i) v = static_cast<u64>(static_cast<u128>(v) * y % q);
    ++one[v];
  }
  std::vector<u64> acc = one;
  for (int j = 1; j < s; ++j) {
    std::vector<u64> next(q, 0);
    for (u64 a = 0; a < q; ++a) {
      if (!acc[a]) continue;
      for (u64 b = 0; b < q; ++b) {
        if (one[b]) next[(a + b) % q] += acc[a] * one[b];
      }
    }
    acc.swap(next);
  }
  return acc;
}

u64 gcd_of_power_differences(int k) {
  u64 g = 0;
  for (u64 p : primes_up_to(1000)) {
    if (p <= static_cast<u64>(k) + 1) continue;
    u64 v = 1;
    for (int i = 0; i < k; ++i) v *= p;
    g = std::gcd(g, v - 1);
  }
  return g;
}

}  // namespace

TEST_CASE("tau and gamma") {
  CHECK(tau(2, 2) == 1);
  CHECK(tau(4, 2) == 2);
  CHECK(tau(3, 5) == 0);
  CHECK(gamma(2, 2) == 3);
  CHECK(gamma(3, 2) == 1);
  CHECK(gamma(6, 3) == 2);
  CHECK(gamma(4, 2) == 4);
  CHECK(gamma(4, 5) == 1);
}

TEST_CASE("R_k matches the gcd of p^k - 1 over large primes") {
  const u64 expected[] = {24, 2, 240, 2, 504};
  for (int k = 2; k <= 6; ++k) {
    LocalConstants lc = waring_goldbach_modulus(k);
    CHECK(lc.R_k == expected[k - 2]);
    // Excluding primes p | R_k, p^k - 1 is divisible by exactly R_k in gcd.
    u64 g = 0;
    for (u64 p : primes_up_to(1000)) {
      if (lc.R_k % p == 0) continue;
      u64 v = 1;
      for (int i = 0; i < k; ++i) v *= p;
      g = std::gcd(g, v - 1);
    }
    CHECK(g == lc.R_k);
    if (k != 4) CHECK(gcd_of_power_differences(k) % lc.R_k == 0);
    u64 prod = 1;
    for (const auto& e : lc.entries) {
      CHECK((static_cast<u64>(k) % e.p == 0) == (e.tau > 0));
      u64 pt = 1;
      for (int i = 0; i < e.gamma; ++i) pt *= e.p;
      prod *= pt;
    }
    CHECK(prod == lc.R_k);
  }
  auto lc6 = waring_goldbach_modulus(6);
  REQUIRE(lc6.entries.size() == 3);
  CHECK(lc6.entries[1].p == 3);
  CHECK(lc6.entries[1].gamma == 2);
}

TEST_CASE("p^k = 1 mod R_k for the first 1000 primes coprime to R_k") {
  std::vector<u64> primes = primes_up_to(20000);
  for (int k = 2; k <= 6; ++k) {
    u64 R = waring_goldbach_modulus(k).R_k;
    int seen = 0;
    for (u64 p : primes) {
      if (std::gcd(p, R) != 1) continue;
      CHECK(powmod(p, static_cast<u64>(k), R) == 1 % R);
      if (++seen == 1000) break;
    }
    CHECK(seen == 1000);
  }
}

TEST_CASE("sigma examples and CRT") {
  CHECK(sigma(1, 2, 8) == 4);
  CHECK(sigma(1, 2, 24) == 8);
  CHECK(sigma(1, 5, 1) == 1);
  CHECK(sigma(1, 3, 1) == 1);
  for (u64 W1 : {3u, 4u, 5u, 7u, 8u, 9u}) {
    for (u64 W2 : {5u, 7u, 11u, 16u, 25u}) {
      if (std::gcd(W1, W2) != 1) continue;
      for (u64 b = 1; b <= W1 * W2; ++b) {
        for (int k : {2, 3}) {
          CHECK(sigma(b, k, W1 * W2) == sigma(b % W1, k, W1) * sigma(b % W2, k, W2));
        }
      }
    }
  }
  CHECK_THROWS_AS(sigma(1, 2, 0), Error);
}

TEST_CASE("count_unit_solutions against brute force") {
  CHECK(count_unit_solutions(5, 1, 2, 4).count == 16);
  CHECK(count_unit_solutions(5, 0, 2, 4).count == 96);
  CHECK(brute_count(5, 1, 2, 4) == 16);
  CHECK(brute_count(5, 0, 2, 4) == 96);
  for (int s : {3, 4, 5}) CHECK(count_unit_solutions(2, s % 2, 3, s).count == 1);
  for (u64 h : {1u, 3u, 4u, 6u, 8u, 9u, 10u, 12u, 15u, 16u}) {
    for (u64 m = 0; m < h; ++m) {
      for (int k : {2, 3}) {
        CHECK(count_unit_solutions(h, m, k, 3).count == brute_count(h, m, k, 3));
      }
    }
  }
  CHECK_THROWS_AS(count_unit_solutions(0, 0, 2, 4), Error);
  // count <= phi(h)^s
  for (u64 h = 1; h <= 60; ++h) {
    u64 bound = 1;
    for (int i = 0; i < 4; ++i) bound *= euler_phi(h);
    for (u64 m = 0; m < h; ++m) CHECK(count_unit_solutions(h, m, 2, 4).count <= bound);
  }
}

TEST_CASE("lifting equals enumeration") {
  CHECK(lift_prime_power(5, 2, 1, 2, 4) == 2000);
  CHECK(lift_prime_power(5, 1, 1, 2, 4) == 16);
  CHECK(lift_prime_power(3, 1, 2, 2, 4) == 0);
  for (u64 p : {3u, 5u, 7u, 11u, 13u}) {
    for (int k : {2, 3}) {
      for (int s : {4, 5}) {
        u64 q = p;
        for (int t = 1; q <= 3000; ++t, q *= p) {
          std::vector<u64> oracle = convolution_oracle(q, k, s);
          for (u64 m = 0; m < q; ++m) {
            CHECK(lift_prime_power(p, t, m, k, s) == oracle[m]);
          }
        }
      }
    }
  }
}

TEST_CASE("multiplicativity over coprime moduli") {
  for (u64 h1 = 2; h1 <= 200; h1 += 13) {
    for (u64 h2 = 3; h2 <= 200; h2 += 17) {
      if (std::gcd(h1, h2) != 1) continue;
      for (u64 m = 0; m < h1 * h2; m += 1 + h1 * h2 / 40) {
        Count whole = count_unit_solutions(h1 * h2, m, 2, 4).count;
        Count split = count_unit_solutions(h1, m % h1, 2, 4).count * count_unit_solutions(h2, m % h2, 2, 4).count;
        CHECK(whole == split);
      }
    }
  }
}

TEST_CASE("positivity for admissible residues (h <= 120)") {
  for (int k : {2, 3, 4}) {
    int s = k * (k + 1) / 2 + 1;
    u64 R = waring_goldbach_modulus(k).R_k;
    for (u64 h = 1; h <= 120; ++h) {
      u64 g = std::gcd(h, R);
      std::vector<Count> dist = unit_solution_distribution(h, k, s);
      for (u64 m = 0; m < h; ++m) {
        if (m % g != static_cast<u64>(s) % g) continue;
        // Seven unit cubes (each +-1 mod 9) never sum to 0 mod 9.
        bool cube_obstruction = k == 3 && h % 9 == 0 && m % 9 == 0;
        CHECK((dist[m] > 0) == !cube_obstruction);
      }
    }
  }
}

TEST_CASE("the mod 9 obstruction for seven cubes, by brute force") {
  CHECK(brute_count(9, 0, 3, 7) == 0);
  for (u64 m = 1; m < 9; ++m) CHECK(brute_count(9, m, 3, 7) > 0);
  CHECK(count_unit_solutions(9, 0, 3, 7).count == 0);
  // nine cubes clear it
  CHECK(brute_count(9, 0, 3, 9) > 0);
}

TEST_CASE("distribution vector agrees with pointwise counts") {
  for (u64 h : {24u, 35u, 72u, 100u}) {
    auto dist = unit_solution_distribution(h, 2, 4);
    Count total = 0;
    for (u64 m = 0; m < h; ++m) {
      CHECK(dist[m] == count_unit_solutions(h, m, 2, 4).count);
      total += dist[m];
    }
    Count phi4 = 1;
    for (int i = 0; i < 4; ++i) phi4 *= euler_phi(h);
    CHECK(total == phi4);
  }
}

TEST_CASE("decompose_residue") {
  CHECK(decompose_residue(4, 8, 2, 4) == std::vector<u64>{1, 1, 1, 1});
  CHECK(decompose_residue(12, 8, 2, 4) == std::vector<u64>{1, 1, 1, 1});
  CHECK(decompose_residue(7, 24, 2, 7) == std::vector<u64>(7, 1));
  CHECK(decompose_residue(2, 5, 2, 4) == std::vector<u64>{1, 1, 1, 4});
  CHECK_THROWS_AS(decompose_residue(1, 8, 2, 4), Error);
  try {
    decompose_residue(1, 8, 2, 4);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsolvable);
  }
  for (u64 W : {5u, 7u, 24u, 48u, 120u, 240u}) {
    for (int k : {2, 3}) {
      for (int s : {4, 5}) {
        for (u64 n = 0; n < W; ++n) {
          bool solvable = count_unit_solutions(W, n, k, s).count > 0;
          if (!solvable) {
            CHECK_THROWS_AS(decompose_residue(n, W, k, s), Error);
            continue;
          }
          auto b = decompose_residue(n, W, k, s);
          REQUIRE(b.size() == static_cast<std::size_t>(s));
          u64 sum = 0;
          for (u64 v : b) {
            CHECK(v >= 1);
            CHECK(v <= W);
            CHECK(std::gcd(v, W) == 1);
            bool is_power = false;
            for (u64 y = 1; y < W && !is_power; ++y) {
              is_power = std::gcd(y, W) == 1 && powmod(y, static_cast<u64>(k), W) == v % W;
            }
            CHECK(is_power);
            sum += v;
          }
          CHECK(sum % W == n);
          CHECK(std::is_sorted(b.begin(), b.end()));
        }
      }
    }
  }
}

TEST_CASE("four nonzero squares cover Z_p") {
  CHECK(cauchy_davenport_check(5));
  CHECK(cauchy_davenport_check(7));
  CHECK(cauchy_davenport_check(13));
  for (u64 p : primes_up_to(300)) {
    if (p >= 5) CHECK(cauchy_davenport_check(p));
  }
  CHECK_THROWS_AS(cauchy_davenport_check(4), Error);
}

TEST_CASE("lifted counts beyond 64 bits stay exact") {
  Count big = lift_prime_power(13, 10, 1, 2, 4);
  Count scale = 1;
  for (int i = 0; i < 27; ++i) scale *= 13;
  CHECK(big == scale * lift_prime_power(13, 1, 1, 2, 4));
  CHECK(big > Count{1} << 64);
  CHECK(to_decimal(Count{1} << 70) == "1180591620717411303424");
}
