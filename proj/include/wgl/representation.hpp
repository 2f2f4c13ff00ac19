#pragma once

// Counting representations n = p_1^k + ... + p_s^k with every prime in a
// short interval, the subinterval/residue bookkeeping of the almost-all
// argument, and exceptional-set scans.

#include <optional>
#include <string>
#include <vector>

#include "wgl/arith.hpp"
#include "wgl/selberg_sieve.hpp"

namespace wgl {

enum class CountMode { exact, convolution };

struct RepresentationQuery {
  u64 n = 0;
  int k = 2;
  int s = 4;
  u64 lo = 0;  // primes p with lo < p <= hi
  u64 hi = 0;
  CountMode mode = CountMode::exact;
};

/// Primes in (lo, hi].
std::vector<u64> primes_in_open_closed(u64 lo, u64 hi);

/// Meet-in-the-middle counter for one prime interval. The two half tables
/// hold the distinct sums of ceil(s/2) and floor(s/2) k-th powers together
/// with their ordered multiplicities.
class ExactCounter {
 public:
  ExactCounter(int k, int s, u64 lo, u64 hi, u64 memory_budget = u64{2} << 30);

  u64 count(u64 n) const;
  std::size_t prime_count() const { return primes_.size(); }

  /// Nondecreasing tuples (p_1 <= ... <= p_s) with the given sum, at most limit.
  std::vector<std::vector<u64>> witnesses(u64 n, std::size_t limit = 100) const;

 private:
  struct Half {
    std::vector<u64> sums;
    std::vector<u64> ways;
  };
  static Half build_half(const std::vector<u64>& powers, int h);

  int k_, s_;
  std::vector<u64> primes_;
  std::vector<u64> powers_;
  Half left_, right_;
};

u64 count_exact(const RepresentationQuery& query);

struct ConvolutionCounts {
  u64 n_lo = 0;
  u64 n_hi = 0;
  std::vector<u64> counts;  // index n - n_lo
  bool exact_fallback = false;
  double max_residual = 0;

  u64 at(u64 n) const { return counts.at(n - n_lo); }
};

/// Counts for every n in [n_lo, n_hi] from the s-fold self-convolution of
/// the indicator of {p^k : lo < p <= hi}.
ConvolutionCounts count_convolution(int k, int s, u64 lo, u64 hi, u64 n_lo, u64 n_hi,
                                    u64 memory_budget = u64{4} << 30);

struct ConvolutionValue {
  double raw = 0;
  double normalized = 0;  // raw / N^{s-1}
  double rounding_bound = 0;
  bool integral = false;  // all tables integer-valued; raw was rounded
};

/// (f_1 * ... * f_s)(n0) by spectral multiplication.
ConvolutionValue convolution_at(const std::vector<WeightTable>& tables, u64 n0);

/// M_1 = M, M_{i+1} = floor(M_i - (M_i/s)^{(k-1+theta)/k}), stopping at the
/// first term <= M/2.
std::vector<u64> subdivide_range(u64 M, int k, int s, double theta);

/// log M * M^{(1-theta)/k}, the order of the subdivision length.
double subdivision_bound(u64 M, int k, double theta);

struct ResidueClassSetup {
  u64 l = 0;
  u64 n_l = 0;
  std::vector<u64> b;
  bool flagged = false;  // no decomposition exists
};

/// For each l in [0, W) holding an n in (M_i - step, M_i] with n = s (mod R_k):
/// the least such n and the decomposition of its residue into s unit k-th powers.
std::vector<ResidueClassSetup> residue_setup(u64 M_i, int k, int s, double theta, u64 W);

/// Integer bounds (lo, hi] of ((n/s)^{1/k} - n^{theta/k}, (n/s)^{1/k} + n^{theta/k}].
std::pair<u64, u64> prime_window(u64 n, int k, int s, double theta);

struct PrimeWindowRun {
  u64 n_first = 0;
  u64 n_last = 0;
  u64 lo = 0;  // the prime set is (lo, hi]
  u64 hi = 0;
};

/// Splits [n_lo, n_hi] into maximal runs on which the prime window holds
/// the same set of primes.
std::vector<PrimeWindowRun> prime_window_runs(u64 n_lo, u64 n_hi, int k, int s, double theta);

struct ScanRequest {
  u64 M = 0;
  int k = 2;
  int s = 4;
  double theta = 0.75;
  double w = 3;  // W = 2 k^2 prod_{p <= w} p for the residue bookkeeping
  std::optional<u64> W_override;
  std::optional<u64> window_begin;  // default: seeded position in (M/2, M]
  u64 window_count = 10000;         // admissible n to test
  u64 seed = 1;
  unsigned workers = 1;
  u64 memory_budget = u64{4} << 30;
};

struct SubintervalInfo {
  u64 M_i = 0;
  double x = 0;
  i64 N = 0;
  u64 m = 0;
};

struct ScanReport {
  u64 M = 0;
  int k = 0;
  int s = 0;
  double theta = 0;
  u64 W = 0;
  u64 R_k = 0;
  std::vector<SubintervalInfo> subintervals;  // those meeting the window
  u64 subdivision_length = 0;
  double subdivision_bound = 0;
  u64 window_begin = 0;
  u64 window_end = 0;
  u64 tested = 0;
  std::vector<u64> exceptional;
  std::vector<u64> unconfirmed;  // convolution said 0, exact counter disagreed
  std::optional<double> density;
  double coverage = 0;  // tested / #admissible n in (M/2, M]
  u64 n0_in_range = 0;
  u64 n0_out_of_range = 0;
  u64 flagged_classes = 0;
  u64 convolution_runs = 0;
  u64 exact_fallback_runs = 0;
  std::vector<std::string> warnings;
  double wall_time = 0;
};

ScanReport scan_exceptional(const ScanRequest& req);

}  // namespace wgl
