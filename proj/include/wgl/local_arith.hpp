#pragma once

// Exact arithmetic of the local (congruence) obstructions to writing n as a
// sum of s k-th powers of primes.

#include <vector>

#include "wgl/arith.hpp"

namespace wgl {

// Exact solution counts can exceed 64 bits (phi(h)^s); they are kept in
// 128 bits and every product is overflow-checked.
using Count = u128;

struct LocalEntry {
  u64 p;
  int tau;
  int gamma;
};

/// The congruence skeleton for exponent k: every prime p with (p-1) | k,
/// the exact power p^tau dividing k, the lifting level gamma, and the
/// product R_k of all p^gamma.
struct LocalConstants {
  int k = 0;
  std::vector<LocalEntry> entries;
  u64 R_k = 1;
};

/// Exponent of p in k.
int tau(int k, u64 p);

/// tau + 2 when p = 2 and tau > 0, tau + 1 otherwise.
int gamma(int k, u64 p);

LocalConstants waring_goldbach_modulus(int k);

/// #{z in [1, W] : z^k = b (mod W)} by direct enumeration.
u64 sigma(u64 b, int k, u64 W);

struct CongruenceCount {
  u64 h = 1;
  u64 m = 0;
  int k = 0;
  int s = 0;
  Count count = 0;
};

/// Ordered count of (y_1..y_s) in (Z/h)^* with y_1^k + ... + y_s^k = m (mod h).
/// Computed as a CRT product of prime-power counts.
CongruenceCount count_unit_solutions(u64 h, u64 m, int k, int s);

/// Unit-solution count modulo p^t. Levels t <= gamma are counted by exact
/// enumeration of the power-sum distribution; higher levels use
///   M_s(p^t, m) = p^{(t-gamma)(s-1)} M_s(p^gamma, m mod p^gamma).
Count lift_prime_power(u64 p, int t, u64 m, int k, int s);

/// The whole vector m -> M_s(h, m), m in [0, h).
std::vector<Count> unit_solution_distribution(u64 h, int k, int s);

/// Exact distribution of y_1^k + ... + y_s^k over units mod q, by iterated
/// convolution of the k-th power value histogram. No lifting involved.
std::vector<Count> power_sum_distribution(u64 q, int k, int s);

/// Lexicographically smallest (b_1..b_s), each b_i in [1, W] the k-th power
/// of a unit mod W, with b_1 + ... + b_s = n (mod W). Throws Errc::unsolvable.
std::vector<u64> decompose_residue(u64 n, u64 W, int k, int s);

/// Verifies that four nonzero squares mod p cover every residue (p >= 5 prime).
bool cauchy_davenport_check(u64 p);

}  // namespace wgl
