#include "wgl/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "wgl/error.hpp"
#include "wgl/spectral.hpp"

namespace wgl {

namespace {

constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;

// Neumaier summation for one real component.
struct Accumulator {
  double sum = 0;
  double comp = 0;

  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct ComplexAccumulator {
  Accumulator re, im;
  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  cplx value() const { return {re.value(), im.value()}; }
};

struct SparseEntry {
  u64 n;
  double value;
};

std::vector<SparseEntry> sparse(const WeightTable& table) {
  std::vector<SparseEntry> out;
  for (u64 i = 0; i < table.values.size(); ++i) {
    if (table.values[i] != 0.0) out.push_back({i + 1, table.values[i]});
  }
  return out;
}

cplx sparse_dft(const std::vector<SparseEntry>& entries, long double alpha) {
  ComplexAccumulator acc;
  for (const auto& e : entries) acc.add(e.value * unit_phase(static_cast<long double>(e.n) * alpha));
  return acc.value();
}

template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iterations = 48) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

std::vector<u64> convergent_denominators(u64 num, u64 den, double Q) {
  std::vector<u64> qs{1};
  u128 q_prev = 0, q_cur = 1;  // q_{-1}, q_0
  u128 n = num, d = den;
  while (d != 0 && n != 0) {
    // alpha = n/d < 1 on the first pass; expand d/n
    u128 a = d / n;
    u128 r = d % n;
    u128 q_next = a * q_cur + q_prev;
    if (static_cast<long double>(q_next) > Q) break;
    qs.push_back(static_cast<u64>(q_next));
    q_prev = q_cur;
    q_cur = q_next;
    d = n;
    n = r;
  }
  return qs;
}

// |q num/den - a| for the nearest integer a, exactly; returns (a, gap numerator).
std::pair<u64, u128> nearest(u64 q, u64 num, u64 den) {
  u128 qn = static_cast<u128>(q) * num;
  u128 a = (qn + den / 2) / den;
  u128 gap = qn >= a * den ? qn - a * den : a * den - qn;
  return {static_cast<u64>(a), gap};
}

}  // namespace

cplx unit_phase(long double x) {
  long double r = x - std::floor(x);
  long double ang = kTwoPi * r;
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

cplx dft_at(const WeightTable& table, long double alpha) {
  ComplexAccumulator acc;
  for (u64 i = 0; i < table.values.size(); ++i) {
    double v = table.values[i];
    if (v != 0.0) acc.add(v * unit_phase(static_cast<long double>(i + 1) * alpha));
  }
  return acc.value();
}

cplx indicator_dft(u64 N, long double alpha) {
  long double r = alpha - std::floor(alpha);
  if (r == 0) return {static_cast<double>(N), 0.0};
  // e((N+1) alpha / 2) sin(pi N alpha) / sin(pi alpha)
  const long double pi = std::numbers::pi_v<long double>;
  long double nr = static_cast<long double>(N) * r;
  long double ratio = std::sin(pi * (nr - std::floor(nr))) / std::sin(pi * r);
  // sin(pi N r) = (-1)^{floor(N r)} sin(pi frac(N r))
  if (static_cast<u64>(std::floor(nr)) % 2 == 1) ratio = -ratio;
  long double half_phase = (static_cast<long double>(N + 1) * r) / 2;
  return static_cast<double>(ratio) * unit_phase(half_phase);
}

cplx Spectrum::at(u64 j) const {
  j %= G;
  if (j <= G / 2) return half[j];
  return std::conj(half[G - j]);
}

u64 default_grid(u64 N) {
  u64 G = 1;
  while (G < 16 * N) G <<= 1;
  return G;
}

Spectrum spectrum(const WeightTable& table, u64 G) {
  if (G < 2 * table.N || G < 2) throw Error(Errc::grid_too_small, "grid size must be at least 2N");
  std::vector<double> signal(table.N + 1, 0.0);
  std::copy(table.values.begin(), table.values.end(), signal.begin() + 1);
  return Spectrum{G, forward_half_spectrum(signal, G)};
}

void write_spectrum_csv(const Spectrum& spec, std::ostream& os) {
  char buf[96];
  os << "j,real,imag\n";
  for (u64 j = 0; j < spec.G; ++j) {
    cplx z = spec.at(j);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", z.real() + 0.0, z.imag() + 0.0);
    os << j << ',' << buf << '\n';
  }
}

cplx exponential_sum_E_b(const WTrickContext& ctx, const SieveWeights& weights, long double alpha,
                         const std::vector<Root>& roots) {
  ComplexAccumulator acc;
  const auto W = static_cast<long double>(ctx.W);
  for (const Root& r : roots) {
    double w = rho_plus(r.t, weights);
    if (w == 0.0) continue;
    long double tk = static_cast<long double>(checked_pow(r.t, static_cast<unsigned>(ctx.k)));
    acc.add(w * unit_phase(tk * alpha / W));
  }
  return acc.value();
}

cplx exponential_sum_E_b(const WTrickContext& ctx, const SieveWeights& weights, long double alpha) {
  return exponential_sum_E_b(ctx, weights, alpha, table_roots(ctx));
}

cplx factored_vhat(const WTrickContext& ctx, const SieveWeights& weights, long double alpha,
                   const std::vector<Root>& roots) {
  long double shift = static_cast<long double>(ctx.X) * alpha / static_cast<long double>(ctx.W);
  return unit_phase(-shift) * table_constant(ctx, weights) * exponential_sum_E_b(ctx, weights, alpha, roots);
}

ArcDissection make_dissection(u64 X, u64 Y, double q_exponent, double A, double max_listed_q) {
  if (X < 3 || Y == 0) throw Error(Errc::precondition, "dissection needs X >= 3 and Y >= 1");
  if (!(q_exponent > 0)) throw Error(Errc::precondition, "q exponent must be positive");
  ArcDissection d;
  d.X = X;
  d.Y = Y;
  d.A = A;
  d.q_exponent = q_exponent;
  d.Q = std::pow(std::log(static_cast<double>(X)), q_exponent);
  d.T = static_cast<double>(Y) / d.Q;
  if (d.Q <= max_listed_q) {
    auto qmax = static_cast<u64>(std::floor(d.Q));
    for (u64 q = 1; q <= qmax; ++q) {
      for (u64 a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        d.arcs.push_back({q, a, static_cast<double>(a) / static_cast<double>(q), 1.0 / (static_cast<double>(q) * d.T)});
      }
    }
    d.arcs_materialized = true;
  }
  return d;
}

namespace {

ArcClass classify_impl(u64 num, u64 den, const ArcDissection& arcs, bool with_distance) {
  if (den == 0 || num >= den) throw Error(Errc::precondition, "alpha must lie in [0, 1)");
  u64 g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  const long double inv_T = 1.0L / arcs.T;
  const long double dden = static_cast<long double>(den);
  for (u64 q : convergent_denominators(num, den, arcs.Q)) {
    auto [a, gap] = nearest(q, num, den);
    if (std::gcd(a, q) != 1 && !(a == 0 && q == 1)) continue;
    if (static_cast<long double>(gap) / dden <= inv_T) {
      ArcClass c;
      c.major = true;
      c.q = q;
      c.a = a == 0 ? q : a;
      return c;
    }
  }
  ArcClass c;
  if (!with_distance) return c;
  long double alpha = static_cast<long double>(num) / dden;
  long double best = 1.0L;
  auto consider = [&](u64 q) {
    u128 qn = static_cast<u128>(q) * num;
    u64 af = static_cast<u64>(qn / den);
    for (u64 a : {af, af + 1}) {
      if (std::gcd(a, q) != 1 && !(q == 1)) continue;
      long double dist = std::abs(alpha - static_cast<long double>(a) / q) - inv_T / q;
      best = std::min(best, dist);
    }
  };
  auto qcap = static_cast<u64>(std::min<double>(arcs.Q, 1e4));
  for (u64 q = 1; q <= qcap; ++q) consider(q);
  for (u64 q : convergent_denominators(num, den, arcs.Q)) consider(q);
  c.distance = static_cast<double>(std::max(best, 0.0L));
  return c;
}

}  // namespace

ArcClass classify_rational(u64 num, u64 den, const ArcDissection& arcs) {
  return classify_impl(num, den, arcs, true);
}

ArcClass classify(double alpha, const ArcDissection& arcs) {
  double r = alpha - std::floor(alpha);
  constexpr u64 den = u64{1} << 60;
  auto num = static_cast<u64>(std::llround(std::ldexp(static_cast<long double>(r), 60)));
  if (num >= den) num = 0;
  return classify_rational(num, den, arcs);
}

PseudorandomnessReport pseudorandomness_report(const WeightTable& majorant, const ArcDissection& arcs, u64 G) {
  const u64 N = majorant.N;
  if (N == 0) throw Error(Errc::precondition, "empty table");
  if (G == 0) G = default_grid(N);
  PseudorandomnessReport rep;
  rep.N = N;
  rep.G = G;

  WeightTable diff{N, majorant.values, TableKind::signed_difference};
  for (auto& v : diff.values) v -= 1.0;
  Spectrum spec = spectrum(diff, G);
  diff.values.clear();
  diff.values.shrink_to_fit();

  const u64 H = G / 2;
  std::vector<double> mag(H + 1);
  for (u64 j = 0; j <= H; ++j) mag[j] = std::abs(spec.half[j]);
  spec.half.clear();
  spec.half.shrink_to_fit();

  const double dN = static_cast<double>(N);
  u64 jmax = static_cast<u64>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  rep.grid_sup = mag[jmax] / dN;
  rep.sup_all = rep.grid_sup;
  rep.argmax_alpha = static_cast<double>(jmax) / static_cast<double>(G);

  std::vector<SparseEntry> entries = sparse(majorant);
  bool refine = rep.grid_sup > 1e-12 && entries.size() <= 200000;
  auto distance_at = [&](double a) {
    return std::abs(sparse_dft(entries, a) - indicator_dft(N, a)) / dN;
  };
  const double step = 1.0 / static_cast<double>(G);

  if (refine) {
    std::vector<u64> peaks;
    for (u64 j = 0; j <= H; ++j) {
      double left = j == 0 ? mag[1] : mag[j - 1];
      double right = j == H ? mag[H - 1] : mag[j + 1];
      if (mag[j] >= left && mag[j] >= right) peaks.push_back(j);
    }
    std::size_t top = std::min<std::size_t>(10, peaks.size());
    std::partial_sort(peaks.begin(), peaks.begin() + top, peaks.end(),
                      [&](u64 a, u64 b) { return mag[a] > mag[b]; });
    for (std::size_t i = 0; i < top; ++i) {
      double center = static_cast<double>(peaks[i]) * step;
      auto [a, v] = golden_max(distance_at, center - step, center + step);
      if (v > rep.sup_all) {
        rep.sup_all = v;
        rep.argmax_alpha = a - std::floor(a);
      }
    }
  }

  // Largest grid value outside the major arcs.
  std::vector<std::uint32_t> order(H + 1);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return mag[a] > mag[b]; });
  for (std::uint32_t j : order) {
    if (classify_impl(j, G, arcs, false).major) continue;
    rep.minor_found = true;
    rep.sup_minor = mag[j] / dN;
    rep.argmax_minor_alpha = static_cast<double>(j) * step;
    if (refine) {
      double center = static_cast<double>(j) * step;
      auto [a, v] = golden_max(distance_at, center - step, center + step);
      if (v > rep.sup_minor && !classify(a, arcs).major) {
        rep.sup_minor = v;
        rep.argmax_minor_alpha = a - std::floor(a);
      }
    }
    break;
  }
  rep.sup_minor = std::min(rep.sup_minor, rep.sup_all);
  return rep;
}

PseudorandomnessReport pseudorandomness_report(const WTrickContext& ctx, const SieveWeights& weights,
                                               const ArcDissection& arcs, u64 G, unsigned workers) {
  return pseudorandomness_report(build_v_b(ctx, weights, workers), arcs, G);
}

RestrictionNorm restriction_norm(const WeightTable& table, double q_exp, u64 G) {
  if (!(q_exp >= 1.0)) throw Error(Errc::precondition, "restriction exponent must be >= 1");
  if (table.N == 0) throw Error(Errc::precondition, "empty table");
  if (G == 0) G = default_grid(table.N);
  Spectrum spec = spectrum(table, G);
  long double total = 0;
  const u64 H = G / 2;
  for (u64 j = 0; j <= H; ++j) {
    long double v = std::pow(static_cast<long double>(std::abs(spec.half[j])), static_cast<long double>(q_exp));
    bool self_conjugate = j == 0 || (G % 2 == 0 && j == H);
    total += self_conjugate ? v : 2 * v;
  }
  RestrictionNorm out;
  out.q = q_exp;
  out.G = G;
  out.N = table.N;
  out.norm = static_cast<double>(std::pow(total / G, 1.0L / q_exp));
  out.ratio = out.norm / std::pow(static_cast<double>(table.N), 1.0 - 1.0 / q_exp);
  return out;
}

}  // namespace wgl
