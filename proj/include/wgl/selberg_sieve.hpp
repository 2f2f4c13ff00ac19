#pragma once

// W-trick context and the Selberg upper-bound sieve majorant built on it:
// the normalizer J, the weights rho_d, alpha^+, rho^+, and the weight tables
// f_b (prime k-th powers) and v_b (sieve majorant) on [N].

#include <iosfwd>
#include <optional>
#include <vector>

#include "wgl/arith.hpp"

namespace wgl {

/// 2 k^2 prod_{p <= w} p. The extra [1/varrho]!^2 factor is only available
/// through w_trick_modulus_full; it is astronomically large at desk scale.
u64 w_trick_modulus(int k, double w);
u64 w_trick_modulus_full(int k, double w, double varrho);

struct ContextRequest {
  int k = 2;
  int s = 4;
  double theta = 0.75;
  double delta = 0.0;  // 0 selects the default 0.9 * theta / k
  double varrho = 0.05;
  double w = 3.0;
  u64 M_i = 0;
  std::optional<u64> W_override;
  u64 b = 1;
};

struct WTrickContext {
  int k = 2;
  int s = 4;
  double theta = 0;
  double delta = 0;
  double varrho = 0;
  double w = 0;
  u64 W = 1;
  bool W_overridden = false;
  u64 b = 1;
  u64 M_i = 0;
  double x = 0;  // (M_i / s)^(1/k)
  u64 m = 0;
  u64 N = 0;
  u64 X = 0;  // W m + b
  u64 Y = 0;  // W N
  double z = 0;  // X^(delta/2) of the b = 1 context, shared by every b
  double D = 0;  // z^2
  double xy_ratio = 0;  // Y / ((ks+k)/s X^(1 - 1/k + theta/k))
};

/// N for a given subinterval top M_i, no validation. Exposed for searches.
i64 window_length(int k, int s, double theta, u64 W, u64 M_i);

WTrickContext build_context(const ContextRequest& req);

/// Same request, with M_i chosen so that N equals n_target exactly.
WTrickContext context_for_length(ContextRequest req, u64 n_target);

/// The context for another residue b (same W, m, N, z).
WTrickContext with_residue(const WTrickContext& ctx, u64 b);

/// Sum over squarefree d < z with gcd(d, W) = 1 of 1/phi(d).
double compute_J(double z, u64 W);

struct SieveWeights {
  double z = 0;
  u64 W = 1;
  std::vector<u64> support;   // squarefree d < z, gcd(d, W) = 1, ascending
  std::vector<double> rho;    // parallel to support
  std::vector<double> rho_by_d;  // dense lookup, 0 off the support
  std::vector<u64> sieve_primes;  // primes p < z with p not dividing W
  double J = 0;
  std::optional<double> alpha_plus;

  double rho_of(u64 d) const { return d < rho_by_d.size() ? rho_by_d[d] : 0.0; }
};

/// Closed-form Selberg weights
///   rho_d = mu(d) d/phi(d) J^{-1} sum_{e < z/d, e squarefree, (e, dW) = 1} 1/phi(e).
/// When ctx is given, alpha_plus is filled for it.
SieveWeights selberg_weights(double z, u64 W, const WTrickContext* ctx = nullptr);

/// sum_{d1, d2} rho_{d1} rho_{d2} / lcm(d1, d2); equals 1/J.
double diagonal_form(const SieveWeights& weights);

struct AlphaPlus {
  double value = 0;      // phi(W) log X / (k W J)
  double reference = 0;  // 2 / (k delta)
  double ratio = 0;
};

AlphaPlus alpha_plus(const WTrickContext& ctx, const SieveWeights& weights);

/// (sum of rho_d over support d dividing t)^2.
double rho_plus(u64 t, const SieveWeights& weights);

enum class TableKind { prime_power_f, majorant_v, indicator, signed_difference };

const char* to_string(TableKind kind);

/// Finitely supported weight on [1, N]; values[i] is the weight at n = i + 1.
struct WeightTable {
  u64 N = 0;
  std::vector<double> values;
  TableKind kind = TableKind::indicator;

  double at(u64 n) const { return (n >= 1 && n <= N) ? values[n - 1] : 0.0; }
  double sum() const;
  std::vector<u64> support() const;
};

WeightTable indicator_table(u64 N);

/// A root t of W(m + n) + b = t^k with n in [1, N].
struct Root {
  u64 t;
  u64 n;
};

/// All roots, found by walking the progressions t = z0 (mod W) with
/// z0^k = b (mod W) through (X^(1/k), (X+Y)^(1/k)]. Sorted by n.
std::vector<Root> table_roots(const WTrickContext& ctx, unsigned workers = 1);

/// phi(W) X^{1-1/k} log X / (alpha^+ W sigma_W(b)).
double table_constant(const WTrickContext& ctx, const SieveWeights& weights);

WeightTable build_f_b(const WTrickContext& ctx, const SieveWeights& weights, unsigned workers = 1);
WeightTable build_f_b(const WTrickContext& ctx);
WeightTable build_v_b(const WTrickContext& ctx, const SieveWeights& weights, unsigned workers = 1);

struct ProgressionMean {
  u64 modulus;
  u64 residue;
  u64 size;
  double mean;
};

struct MeanConditionProbe {
  std::vector<ProgressionMean> progressions;  // those with size >= varrho N
  double min_mean = 0;
  double threshold = 0;  // 1/s + epsilon
  bool satisfied = false;
};

/// Means of the table over {n in [N] : n = r (mod q)}, q <= max_modulus.
MeanConditionProbe mean_condition_probe(const WeightTable& table, double varrho, int s,
                                        double epsilon, u64 max_modulus = 20);

void write_table_csv(const WeightTable& table, std::ostream& os);

/// Binary run-length export: "WGLRLE01", u64 N, u32 kind, u32 0, u64 runs,
/// then per run u64 first_n, u64 length, length doubles. Host byte order.
void write_table_rle(const WeightTable& table, std::ostream& os);
WeightTable read_table_rle(std::istream& is);

}  // namespace wgl
