#pragma once

// Segmented prime generation in half-open windows [lo, hi) and the
// short-interval density check for primes in residue classes.

#include <vector>

#include "wgl/arith.hpp"

namespace wgl {

struct SieveOptions {
  unsigned workers = 1;
  // Upper bound on the bytes the sieve may allocate for one window.
  u64 memory_budget = u64{1} << 31;
};

struct PrimeInterval {
  u64 lo = 0;
  u64 hi = 0;
  std::vector<u64> primes;  // sorted, every prime in [lo, hi)
};

PrimeInterval primes_in_interval(u64 lo, u64 hi, const SieveOptions& opts = {});

/// Number of listed primes congruent to c mod d.
u64 count_primes_in_ap(const PrimeInterval& interval, u64 d, u64 c);

struct DensityCheck {
  double x = 0;
  double theta = 0;
  double epsilon = 0;
  u64 d = 1;
  u64 c = 0;
  double alpha_minus = 0;
  PrimeInterval interval;
  u64 prime_count = 0;
  double expected_lower = 0;  // alpha^- |I| / (phi(d) log x)
  double observed_ratio = 0;  // pi(I; d, c) phi(d) log x / |I|
  bool pass = false;
};

/// Counts primes = c (mod d) in I = [x, x + x^(theta - epsilon)) and compares
/// the normalized count against alpha^-.
DensityCheck check_density_lower_bound(double x, double theta, double epsilon, u64 d, u64 c,
                                       double alpha_minus, const SieveOptions& opts = {});

}  // namespace wgl
