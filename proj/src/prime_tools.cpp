#include "wgl/prime_tools.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wgl/error.hpp"
#include "wgl/parallel.hpp"

namespace wgl {

namespace {

constexpr u64 kMaxHi = u64{1} << 62;
constexpr u64 kSegment = u64{1} << 18;

// Odd-only sieve of one segment [lo, hi); appends primes in order.
void sieve_segment(u64 lo, u64 hi, const std::vector<u64>& base, std::vector<char>& mark,
                   std::vector<u64>& out) {
  if (lo < 2) lo = 2;
  if (lo >= hi) return;
  if (lo == 2) {
    out.push_back(2);
    lo = 3;
  }
  if ((lo & 1) == 0) ++lo;
  if (lo >= hi) return;
  // mark[i] represents lo + 2i.
  u64 count = (hi - lo + 1) / 2;
  mark.assign(count, 1);
  for (u64 p : base) {
    if (p == 2) continue;
    if (p * p >= hi) break;
    u64 start = std::max(p * p, (lo + p - 1) / p * p);
    if ((start & 1) == 0) start += p;
    for (u64 j = (start - lo) / 2; j < count; j += p) mark[j] = 0;
  }
  for (u64 i = 0; i < count; ++i) {
    if (mark[i]) out.push_back(lo + 2 * i);
  }
}

}  // namespace

PrimeInterval primes_in_interval(u64 lo, u64 hi, const SieveOptions& opts) {
  if (hi > kMaxHi) throw Error(Errc::precondition, "primes_in_interval: hi must be <= 2^62");
  PrimeInterval out{lo, std::max(lo, hi), {}};
  if (hi <= lo || hi <= 2) return out;

  u64 root = iroot(hi - 1, 2);
  // Rough footprint: base primes, the output list, and per-worker segments.
  double expected_primes = static_cast<double>(hi - lo) / std::max(1.0, std::log(static_cast<double>(lo + 2))) * 1.3;
  double bytes = static_cast<double>(root) + 8.0 * expected_primes +
                 static_cast<double>(std::max(1u, opts.workers)) * kSegment;
  if (bytes > static_cast<double>(opts.memory_budget)) {
    throw Error(Errc::resource, "primes_in_interval: window exceeds the memory budget");
  }

  std::vector<u64> base = primes_up_to(root);
  u64 start = std::max<u64>(lo, 2);
  u64 segments = (hi - start + kSegment - 1) / kSegment;
  std::vector<std::vector<u64>> parts(segments);
  parallel_for(segments, opts.workers, [&](std::size_t a, std::size_t b) {
    std::vector<char> mark;
    for (std::size_t i = a; i < b; ++i) {
      u64 slo = start + i * kSegment;
      u64 shi = std::min(hi, slo + kSegment);
      sieve_segment(slo, shi, base, mark, parts[i]);
    }
  });
  std::size_t total = 0;
  for (auto& p : parts) total += p.size();
  out.primes.reserve(total);
  for (auto& p : parts) out.primes.insert(out.primes.end(), p.begin(), p.end());
  return out;
}

u64 count_primes_in_ap(const PrimeInterval& interval, u64 d, u64 c) {
  if (d == 0) throw Error(Errc::precondition, "modulus 0");
  c %= d;
  return static_cast<u64>(std::count_if(interval.primes.begin(), interval.primes.end(),
                                        [&](u64 p) { return p % d == c; }));
}

DensityCheck check_density_lower_bound(double x, double theta, double epsilon, u64 d, u64 c,
                                       double alpha_minus, const SieveOptions& opts) {
  if (!(theta > 0.5 && theta < 1.0)) throw Error(Errc::precondition, "theta must lie in (1/2, 1)");
  if (!(epsilon >= 0.0 && epsilon < theta)) throw Error(Errc::precondition, "epsilon must lie in [0, theta)");
  if (!(x >= 3.0)) throw Error(Errc::precondition, "x must be at least 3");
  if (d == 0 || static_cast<double>(d) > std::log(x)) {
    throw Error(Errc::precondition, "d must satisfy 1 <= d <= log x");
  }
  if (std::gcd(c % d, d) != 1) throw Error(Errc::coprimality, "gcd(c, d) must be 1");

  DensityCheck out;
  out.x = x;
  out.theta = theta;
  out.epsilon = epsilon;
  out.d = d;
  out.c = c % d;
  out.alpha_minus = alpha_minus;

  auto lo = static_cast<u64>(std::ceil(x));
  auto length = static_cast<u64>(std::floor(std::pow(x, theta - epsilon)));
  if (length == 0) throw Error(Errc::precondition, "interval is empty");
  out.interval = primes_in_interval(lo, lo + length, opts);
  out.prime_count = count_primes_in_ap(out.interval, d, out.c);

  double phi_d = static_cast<double>(euler_phi(d));
  double len = static_cast<double>(length);
  out.expected_lower = alpha_minus * len / (phi_d * std::log(x));
  out.observed_ratio = static_cast<double>(out.prime_count) * phi_d * std::log(x) / len;
  out.pass = out.observed_ratio >= alpha_minus;
  return out;
}

}  // namespace wgl
