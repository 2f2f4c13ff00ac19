#include "wgl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "wgl/error.hpp"

namespace wgl {

namespace {

// The FFTW planner is not reentrant.
std::mutex planner_mutex;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_array(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw Error(Errc::resource, "FFT buffer allocation failed");
  return std::unique_ptr<T[], FftwFree>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) throw Error(Errc::resource, "FFTW planning failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

Plan r2c_plan(int n, double* in, fftw_complex* out) {
  std::lock_guard lock(planner_mutex);
  return Plan(fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE));
}

Plan c2r_plan(int n, fftw_complex* in, double* out) {
  std::lock_guard lock(planner_mutex);
  return Plan(fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE));
}

void check_length(std::size_t G) {
  if (G == 0 || G > (std::size_t{1} << 31) - 1) throw Error(Errc::resource, "transform length out of range");
}

// Goldilocks prime arithmetic.
constexpr u64 kP = 0xffffffff00000001ULL;
constexpr u64 kEps = 0xffffffffULL;  // 2^64 mod p

inline u64 reduce128(u128 x) {
  u64 lo = static_cast<u64>(x);
  u64 hi = static_cast<u64>(x >> 64);
  u64 hi_hi = hi >> 32;
  u64 hi_lo = hi & kEps;
  u64 t0 = lo - hi_hi;
  if (lo < hi_hi) t0 -= kEps;
  u64 t1 = hi_lo * kEps;
  u64 r = t0 + t1;
  if (r < t0) r += kEps;
  if (r >= kP) r -= kP;
  return r;
}

inline u64 gmul(u64 a, u64 b) { return reduce128(static_cast<u128>(a) * b); }
inline u64 gadd(u64 a, u64 b) {
  u64 r = a + b;
  if (r < a || r >= kP) r -= kP;
  return r;
}
inline u64 gsub(u64 a, u64 b) { return a >= b ? a - b : a + (kP - b); }

u64 gpow(u64 b, u64 e) {
  u64 r = 1;
  for (; e; e >>= 1, b = gmul(b, b)) {
    if (e & 1) r = gmul(r, b);
  }
  return r;
}

void ntt(std::vector<u64>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<u64> tw;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = gpow(7, (kP - 1) / len);
    if (inverse) w = gpow(w, kP - 2);
    std::size_t half = len / 2;
    tw.resize(half);
    tw[0] = 1;
    for (std::size_t i = 1; i < half; ++i) tw[i] = gmul(tw[i - 1], w);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        u64 u = a[i + j];
        u64 v = gmul(a[i + j + half], tw[j]);
        a[i + j] = gadd(u, v);
        a[i + j + half] = gsub(u, v);
      }
    }
  }
  if (inverse) {
    u64 inv = gpow(n % kP, kP - 2);
    for (auto& x : a) x = gmul(x, inv);
  }
}

std::size_t power_length(const std::vector<std::uint8_t>& indicator, int s) {
  if (s < 1) throw Error(Errc::precondition, "convolution power must be >= 1");
  if (indicator.empty()) return 0;
  return static_cast<std::size_t>(s) * (indicator.size() - 1) + 1;
}

}  // namespace

std::size_t smooth_size(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = std::size_t{1} << (64 - __builtin_clzll(n - 1));
  for (std::size_t a = 1; a < best; a *= 7) {
    for (std::size_t b = a; b < best; b *= 5) {
      for (std::size_t c = b; c < best; c *= 3) {
        std::size_t d = c;
        while (d < n) d *= 2;
        best = std::min(best, d);
      }
    }
  }
  return best;
}

std::vector<std::complex<double>> forward_half_spectrum(const std::vector<double>& signal, std::size_t G) {
  check_length(G);
  if (signal.size() > G) throw Error(Errc::grid_too_small, "grid shorter than the signal");
  auto in = fftw_array<double>(G);
  auto out = fftw_array<fftw_complex>(G / 2 + 1);
  Plan plan = r2c_plan(static_cast<int>(G), in.get(), out.get());
  std::fill(in.get(), in.get() + G, 0.0);
  std::copy(signal.begin(), signal.end(), in.get());
  plan.execute();
  // FFTW's forward transform carries e(-ij/G); conjugate for e(+ij/G).
  std::vector<std::complex<double>> half(G / 2 + 1);
  for (std::size_t j = 0; j < half.size(); ++j) half[j] = {out[j][0], -out[j][1]};
  return half;
}

std::vector<double> inverse_half_spectrum(const std::vector<std::complex<double>>& half, std::size_t G) {
  check_length(G);
  if (half.size() != G / 2 + 1) throw Error(Errc::precondition, "half spectrum has the wrong length");
  auto in = fftw_array<fftw_complex>(G / 2 + 1);
  auto out = fftw_array<double>(G);
  Plan plan = c2r_plan(static_cast<int>(G), in.get(), out.get());
  for (std::size_t j = 0; j < half.size(); ++j) {
    in[j][0] = half[j].real();
    in[j][1] = -half[j].imag();
  }
  plan.execute();
  std::vector<double> signal(out.get(), out.get() + G);
  for (auto& v : signal) v /= static_cast<double>(G);
  return signal;
}

ConvolutionPower self_convolution_power(const std::vector<std::uint8_t>& indicator, int s,
                                        std::size_t out_lo, std::size_t out_hi, u64 memory_budget) {
  ConvolutionPower result;
  if (out_hi < out_lo) return result;
  result.counts.assign(out_hi - out_lo + 1, 0);
  std::size_t full = power_length(indicator, s);
  if (full == 0) return result;

  u64 ones = static_cast<u64>(std::count(indicator.begin(), indicator.end(), std::uint8_t{1}));
  double total = std::pow(static_cast<double>(ones), s);
  if (total > 0x1p53) {
    result.counts = exact_convolution_power(indicator, s, out_lo, out_hi, memory_budget);
    result.exact_fallback = true;
    return result;
  }

  std::size_t L = smooth_size(full);
  check_length(L);
  std::size_t cells = 2 * (L / 2 + 1);
  if (static_cast<u64>(cells) * sizeof(double) > memory_budget) {
    throw Error(Errc::resource, "convolution transform exceeds the memory budget");
  }
  auto buf = fftw_array<double>(cells);
  auto* spec = reinterpret_cast<fftw_complex*>(buf.get());
  Plan fwd = r2c_plan(static_cast<int>(L), buf.get(), spec);
  Plan inv = c2r_plan(static_cast<int>(L), spec, buf.get());
  std::fill(buf.get(), buf.get() + cells, 0.0);
  for (std::size_t i = 0; i < indicator.size(); ++i) buf[i] = indicator[i];
  fwd.execute();
  for (std::size_t j = 0; j < L / 2 + 1; ++j) {
    std::complex<double> z = std::pow(std::complex<double>(spec[j][0], spec[j][1]), s);
    spec[j][0] = z.real() / static_cast<double>(L);
    spec[j][1] = z.imag() / static_cast<double>(L);
  }
  inv.execute();

  long double mass = 0;
  double residual = 0;
  for (std::size_t i = 0; i < full; ++i) {
    double v = buf[i];
    double r = std::nearbyint(v);
    residual = std::max(residual, std::abs(v - r));
    mass += r;
    if (r < 0) residual = std::max(residual, 1.0);
  }
  result.max_residual = residual;
  if (residual >= 0.25 || mass != static_cast<long double>(total)) {
    result.counts = exact_convolution_power(indicator, s, out_lo, out_hi, memory_budget);
    result.exact_fallback = true;
    return result;
  }
  for (std::size_t i = out_lo; i <= out_hi && i < full; ++i) {
    result.counts[i - out_lo] = static_cast<u64>(std::nearbyint(buf[i]));
  }
  return result;
}

std::vector<u64> exact_convolution_power(const std::vector<std::uint8_t>& indicator, int s,
                                         std::size_t out_lo, std::size_t out_hi, u64 memory_budget) {
  std::vector<u64> counts(out_hi >= out_lo ? out_hi - out_lo + 1 : 0, 0);
  std::size_t full = power_length(indicator, s);
  if (full == 0 || counts.empty()) return counts;
  std::size_t L = 1;
  while (L < full) L <<= 1;
  if (L > (std::size_t{1} << 32)) throw Error(Errc::resource, "exact transform too long");
  if (static_cast<u64>(L) * sizeof(u64) > memory_budget) {
    throw Error(Errc::resource, "exact transform exceeds the memory budget");
  }
  std::vector<u64> a(L, 0);
  for (std::size_t i = 0; i < indicator.size(); ++i) a[i] = indicator[i];
  ntt(a, false);
  for (auto& x : a) x = gpow(x, static_cast<u64>(s));
  ntt(a, true);
  for (std::size_t i = out_lo; i <= out_hi && i < full; ++i) counts[i - out_lo] = a[i];
  return counts;
}

}  // namespace wgl
