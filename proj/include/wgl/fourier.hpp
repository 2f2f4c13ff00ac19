#pragma once

// Fourier side of the weight tables: f^(alpha) = sum_n f(n) e(n alpha),
// grid spectra, the exponential sum E_b, major/minor arc classification and
// the two transference diagnostics (sup distance to 1_[N], L^q norm).

#include <complex>
#include <iosfwd>
#include <vector>

#include "wgl/arith.hpp"
#include "wgl/selberg_sieve.hpp"

namespace wgl {

using cplx = std::complex<double>;

/// e(x) = exp(2 pi i x), with x reduced mod 1 in long double first.
cplx unit_phase(long double x);

/// Direct evaluation over the nonzero entries, compensated summation.
cplx dft_at(const WeightTable& table, long double alpha);

/// Closed form of sum_{n=1}^N e(n alpha).
cplx indicator_dft(u64 N, long double alpha);

struct Spectrum {
  u64 G = 0;
  std::vector<cplx> half;  // j = 0..G/2; the rest follows by conjugation

  cplx at(u64 j) const;
};

/// Smallest power of two >= 16 N.
u64 default_grid(u64 N);

/// Grid values f^(j/G). Requires G >= 2N, else Errc::grid_too_small.
Spectrum spectrum(const WeightTable& table, u64 G);

void write_spectrum_csv(const Spectrum& spec, std::ostream& os);

/// sum over roots t of rho^+(t) e(t^k alpha / W).
cplx exponential_sum_E_b(const WTrickContext& ctx, const SieveWeights& weights, long double alpha,
                         const std::vector<Root>& roots);
cplx exponential_sum_E_b(const WTrickContext& ctx, const SieveWeights& weights, long double alpha);

/// e(-(b/W + m) alpha) * c * E_b(alpha), with c the table constant; equals v_b^(alpha).
cplx factored_vhat(const WTrickContext& ctx, const SieveWeights& weights, long double alpha,
                   const std::vector<Root>& roots);

struct Arc {
  u64 q;
  u64 a;
  double center;
  double halfwidth;
};

struct ArcDissection {
  u64 X = 0;
  u64 Y = 0;
  double A = 10;
  double q_exponent = 10;
  double Q = 0;  // (log X)^q_exponent
  double T = 0;  // Y / Q
  std::vector<Arc> arcs;  // only materialized for small Q
  bool arcs_materialized = false;
};

/// Arcs are listed explicitly when Q <= max_listed_q.
ArcDissection make_dissection(u64 X, u64 Y, double q_exponent, double A = 10, double max_listed_q = 200);

struct ArcClass {
  bool major = false;
  u64 q = 0;
  u64 a = 0;
  double distance = 0;  // to the nearest arc; 0 inside one
};

/// Classification of num/den in [0, 1). Membership is decided exactly from
/// the continued-fraction convergents; the smallest admissible q wins.
ArcClass classify_rational(u64 num, u64 den, const ArcDissection& arcs);
ArcClass classify(double alpha, const ArcDissection& arcs);

struct PseudorandomnessReport {
  u64 N = 0;
  u64 G = 0;
  double grid_sup = 0;     // max over grid points, / N
  double sup_all = 0;      // after local refinement, / N
  double argmax_alpha = 0;
  double sup_minor = 0;
  double argmax_minor_alpha = 0;
  bool minor_found = false;
};

/// sup_alpha |nu^(alpha) - 1_[N]^(alpha)| / N over the grid, refined by
/// golden-section search around the ten largest local grid maxima.
PseudorandomnessReport pseudorandomness_report(const WeightTable& majorant, const ArcDissection& arcs,
                                               u64 G = 0);
PseudorandomnessReport pseudorandomness_report(const WTrickContext& ctx, const SieveWeights& weights,
                                               const ArcDissection& arcs, u64 G = 0,
                                               unsigned workers = 1);

struct RestrictionNorm {
  double q = 0;
  u64 G = 0;
  u64 N = 0;
  double norm = 0;   // (G^{-1} sum_j |f^(j/G)|^q)^{1/q}
  double ratio = 0;  // norm / N^{1 - 1/q}
};

RestrictionNorm restriction_norm(const WeightTable& table, double q_exp, u64 G = 0);

}  // namespace wgl
