#include "wgl/local_arith.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "wgl/error.hpp"

namespace wgl {

namespace {

// Bound on q * |image| * s for the distribution convolution.
constexpr u64 kDistributionBudget = u64{4} << 30;

void require_k(int k) {
  if (k < 1) throw Error(Errc::precondition, "k must be positive");
}

void require_modulus(u64 h) {
  if (h == 0) throw Error(Errc::precondition, "modulus 0");
  if (h >= kModulusLimit) throw Error(Errc::precondition, "modulus must be below 2^40");
}

}  // namespace

int tau(int k, u64 p) {
  if (k < 1 || p < 2) throw Error(Errc::precondition, "tau: need k >= 1 and prime p");
  int t = 0;
  u64 kk = static_cast<u64>(k);
  while (kk % p == 0) {
    kk /= p;
    ++t;
  }
  return t;
}

int gamma(int k, u64 p) {
  int t = tau(k, p);
  return (p == 2 && t > 0) ? t + 2 : t + 1;
}

LocalConstants waring_goldbach_modulus(int k) {
  if (k < 2) throw Error(Errc::precondition, "k must be at least 2");
  LocalConstants lc;
  lc.k = k;
  for (int d = 1; d <= k; ++d) {
    if (k % d != 0) continue;
    u64 p = static_cast<u64>(d) + 1;
    if (!is_prime(p)) continue;
    LocalEntry e{p, tau(k, p), gamma(k, p)};
    lc.R_k = checked_mul(lc.R_k, checked_pow(p, static_cast<unsigned>(e.gamma)));
    lc.entries.push_back(e);
  }
  return lc;
}

u64 sigma(u64 b, int k, u64 W) {
  require_k(k);
  require_modulus(W);
  if (W > (u64{1} << 32)) throw Error(Errc::resource, "sigma: W too large to enumerate");
  u64 target = b % W;
  u64 count = 0;
  for (u64 z = 1; z <= W; ++z) {
    if (powmod(z, static_cast<u64>(k), W) == target) ++count;
  }
  return count;
}

std::vector<Count> power_sum_distribution(u64 q, int k, int s) {
  require_k(k);
  require_modulus(q);
  if (s < 1) throw Error(Errc::precondition, "s must be positive");

  std::vector<u64> hist(q, 0);
  for (u64 y = 0; y < q; ++y) {
    if (std::gcd(y, q) == 1) ++hist[powmod(y, static_cast<u64>(k), q)];
  }
  std::vector<std::pair<u64, u64>> image;
  for (u64 a = 0; a < q; ++a) {
    if (hist[a]) image.emplace_back(a, hist[a]);
  }
  if (static_cast<u128>(q) * image.size() * static_cast<u64>(s) > kDistributionBudget) {
    throw Error(Errc::resource, "power-sum distribution too large for modulus " + std::to_string(q));
  }

  std::vector<Count> dist(q, 0);
  for (auto [a, c] : image) dist[a] = c;
  std::vector<Count> next(q);
  for (int j = 1; j < s; ++j) {
    std::fill(next.begin(), next.end(), Count{0});
    for (u64 r = 0; r < q; ++r) {
      if (dist[r] == 0) continue;
      for (auto [a, c] : image) {
        u64 t = r + a;
        if (t >= q) t -= q;
        next[t] += checked_mul128(dist[r], c);
      }
    }
    dist.swap(next);
  }
  return dist;
}

namespace {

// Distribution modulo p^t, lifted from level gamma when t > gamma.
std::vector<Count> prime_power_distribution(u64 p, int t, int k, int s) {
  int g = gamma(k, p);
  u64 q = checked_pow(p, static_cast<unsigned>(t));
  if (t <= g) return power_sum_distribution(q, k, s);

  std::vector<Count> base = power_sum_distribution(checked_pow(p, static_cast<unsigned>(g)), k, s);
  u64 qg = base.size();
  Count scale = 1;
  for (int i = 0; i < (t - g) * (s - 1); ++i) scale = checked_mul128(scale, p);
  std::vector<Count> out(q);
  for (u64 m = 0; m < q; ++m) out[m] = checked_mul128(scale, base[m % qg]);
  return out;
}

}  // namespace

Count lift_prime_power(u64 p, int t, u64 m, int k, int s) {
  if (t < 1) throw Error(Errc::precondition, "lift_prime_power: t must be >= 1");
  if (!is_prime(p)) throw Error(Errc::precondition, "lift_prime_power: p must be prime");
  int g = gamma(k, p);
  if (t <= g) {
    u64 q = checked_pow(p, static_cast<unsigned>(t));
    return power_sum_distribution(q, k, s)[m % q];
  }
  u64 qg = checked_pow(p, static_cast<unsigned>(g));
  Count base = power_sum_distribution(qg, k, s)[m % qg];
  Count scale = 1;
  for (int i = 0; i < (t - g) * (s - 1); ++i) scale = checked_mul128(scale, p);
  return checked_mul128(scale, base);
}

CongruenceCount count_unit_solutions(u64 h, u64 m, int k, int s) {
  require_modulus(h);
  require_k(k);
  if (s < 1) throw Error(Errc::precondition, "s must be positive");
  CongruenceCount out{h, m % h, k, s, 1};
  for (auto [p, t] : factorize(h)) {
    out.count = checked_mul128(out.count, lift_prime_power(p, t, m, k, s));
    if (out.count == 0) break;
  }
  return out;
}

std::vector<Count> unit_solution_distribution(u64 h, int k, int s) {
  require_modulus(h);
  if (h > (u64{1} << 26)) throw Error(Errc::resource, "distribution vector too large");
  std::vector<Count> out(h, 1);
  for (auto [p, t] : factorize(h)) {
    std::vector<Count> part = prime_power_distribution(p, t, k, s);
    u64 q = part.size();
    for (u64 m = 0; m < h; ++m) out[m] = checked_mul128(out[m], part[m % q]);
  }
  return out;
}

std::vector<u64> decompose_residue(u64 n, u64 W, int k, int s) {
  require_modulus(W);
  require_k(k);
  if (s < 1) throw Error(Errc::precondition, "s must be positive");
  if (W > (u64{1} << 22)) throw Error(Errc::resource, "decompose_residue: W too large");

  // Available summands, ordered by their representative in [1, W].
  std::vector<char> is_power(W, 0);
  for (u64 y = 0; y < W; ++y) {
    if (std::gcd(y, W) == 1) is_power[powmod(y, static_cast<u64>(k), W)] = 1;
  }
  std::vector<u64> values;
  for (u64 b = 1; b <= W; ++b) {
    if (is_power[b % W]) values.push_back(b);
  }

  // reach[j][r]: r is a sum of j summands mod W.
  std::vector<std::vector<char>> reach(static_cast<size_t>(s) + 1, std::vector<char>(W, 0));
  reach[0][0] = 1;
  for (int j = 1; j <= s; ++j) {
    for (u64 r = 0; r < W; ++r) {
      if (!reach[j - 1][r]) continue;
      for (u64 b : values) reach[j][(r + b) % W] = 1;
    }
  }
  u64 target = n % W;
  if (!reach[s][target]) {
    throw Error(Errc::unsolvable, "no unit k-th power decomposition of " + std::to_string(n) +
                                      " mod " + std::to_string(W));
  }

  std::vector<u64> out;
  out.reserve(s);
  u64 remaining = target;
  for (int j = s; j >= 1; --j) {
    for (u64 b : values) {
      u64 rest = (remaining + W - b % W) % W;
      if (reach[j - 1][rest]) {
        out.push_back(b);
        remaining = rest;
        break;
      }
    }
  }
  return out;
}

bool cauchy_davenport_check(u64 p) {
  if (p < 5 || !is_prime(p)) throw Error(Errc::precondition, "cauchy_davenport_check: need prime p >= 5");
  std::vector<char> squares(p, 0);
  for (u64 y = 1; y < p; ++y) squares[mulmod(y, y, p)] = 1;
  std::vector<char> sumset(p, 0);
  sumset[0] = 1;
  for (int fold = 0; fold < 4; ++fold) {
    std::vector<char> next(p, 0);
    for (u64 r = 0; r < p; ++r) {
      if (!sumset[r]) continue;
      for (u64 a = 1; a < p; ++a) {
        if (squares[a]) next[(r + a) % p] = 1;
      }
    }
    sumset.swap(next);
  }
  return std::all_of(sumset.begin(), sumset.end(), [](char c) { return c != 0; });
}

}  // namespace wgl
