#include "wgl/representation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "wgl/error.hpp"
#include "wgl/local_arith.hpp"
#include "wgl/parallel.hpp"
#include "wgl/prime_tools.hpp"
#include "wgl/spectral.hpp"

namespace wgl {

std::vector<u64> primes_in_open_closed(u64 lo, u64 hi) {
  if (hi <= lo || hi < 2) return {};
  return primes_in_interval(std::max<u64>(lo + 1, 2), hi + 1).primes;
}

namespace {

u64 checked_add(u64 a, u64 b) {
  u64 r = a + b;
  if (r < a) throw Error(Errc::overflow, "representation count overflows 64 bits");
  return r;
}

// C(n + h - 1, h) as a double, for budget checks.
double multisets(double n, int h) {
  double r = 1;
  for (int i = 0; i < h; ++i) r = r * (n + i) / (i + 1);
  return r;
}

}  // namespace

ExactCounter::Half ExactCounter::build_half(const std::vector<u64>& powers, int h) {
  std::vector<std::pair<u64, u64>> raw;
  if (h == 0) {
    raw.emplace_back(0, 1);
  } else if (!powers.empty()) {
    u64 fact = 1;
    for (int i = 2; i <= h; ++i) fact *= static_cast<u64>(i);
    std::vector<std::size_t> idx(h, 0);
    // Walk nondecreasing index tuples; ordered multiplicity is h!/prod(run!).
    auto visit = [&](auto&& self, int depth, std::size_t start, u64 sum, u64 denom, u64 run) -> void {
      if (depth == h) {
        raw.emplace_back(sum, fact / denom);
        return;
      }
      for (std::size_t i = start; i < powers.size(); ++i) {
        u64 r = (depth > 0 && i == idx[depth - 1]) ? run + 1 : 1;
        idx[depth] = i;
        self(self, depth + 1, i, sum + powers[i], denom * r, r);
      }
    };
    visit(visit, 0, 0, 0, 1, 0);
  }
  std::sort(raw.begin(), raw.end());
  Half half;
  for (auto [v, w] : raw) {
    if (!half.sums.empty() && half.sums.back() == v) {
      half.ways.back() = checked_add(half.ways.back(), w);
    } else {
      half.sums.push_back(v);
      half.ways.push_back(w);
    }
  }
  return half;
}

ExactCounter::ExactCounter(int k, int s, u64 lo, u64 hi, u64 memory_budget) : k_(k), s_(s) {
  if (k < 1) throw Error(Errc::precondition, "k must be positive");
  if (s < 1 || s > 10) throw Error(Errc::precondition, "s must lie in [1, 10]");
  primes_ = primes_in_open_closed(lo, hi);
  if (primes_.size() > 10'000'000) throw Error(Errc::resource, "more than 10^7 primes in the interval");
  int h1 = (s + 1) / 2, h2 = s / 2;
  double entries = multisets(static_cast<double>(primes_.size()), h1) +
                   multisets(static_cast<double>(primes_.size()), h2);
  if (entries * 32 > static_cast<double>(memory_budget)) {
    throw Error(Errc::resource, "half-sum tables exceed the memory budget");
  }
  for (u64 p : primes_) powers_.push_back(checked_pow(p, static_cast<unsigned>(k)));
  // the largest full sum must fit
  if (!powers_.empty()) checked_mul(powers_.back(), static_cast<u64>(s));
  left_ = build_half(powers_, h1);
  right_ = build_half(powers_, h2);
}

u64 ExactCounter::count(u64 n) const {
  if (left_.sums.empty() || right_.sums.empty()) return 0;
  u64 total = 0;
  std::size_t j = right_.sums.size();
  for (std::size_t i = 0; i < left_.sums.size(); ++i) {
    u64 a = left_.sums[i];
    if (a > n) break;
    u64 want = n - a;
    while (j > 0 && right_.sums[j - 1] > want) --j;
    if (j == 0) break;
    if (right_.sums[j - 1] == want) {
      u128 prod = static_cast<u128>(left_.ways[i]) * right_.ways[j - 1];
      if (prod >> 64) throw Error(Errc::overflow, "representation count overflows 64 bits");
      total = checked_add(total, static_cast<u64>(prod));
    }
  }
  return total;
}

std::vector<std::vector<u64>> ExactCounter::witnesses(u64 n, std::size_t limit) const {
  std::vector<std::vector<u64>> out;
  if (powers_.empty()) return out;
  std::vector<std::size_t> idx(s_);
  auto visit = [&](auto&& self, int depth, std::size_t start, u64 rem) -> void {
    if (out.size() >= limit) return;
    int left = s_ - depth;
    if (start >= powers_.size()) return;
    // every remaining power lies in [powers_[start], powers_.back()]
    if (static_cast<u128>(powers_[start]) * left > rem) return;
    if (static_cast<u128>(powers_.back()) * left < rem) return;
    if (left == 1) {
      auto it = std::lower_bound(powers_.begin() + static_cast<std::ptrdiff_t>(start), powers_.end(), rem);
      if (it != powers_.end() && *it == rem) {
        idx[depth] = static_cast<std::size_t>(it - powers_.begin());
        std::vector<u64> tuple;
        for (std::size_t i : idx) tuple.push_back(primes_[i]);
        out.push_back(std::move(tuple));
      }
      return;
    }
    for (std::size_t i = start; i < powers_.size() && powers_[i] <= rem; ++i) {
      idx[depth] = i;
      self(self, depth + 1, i, rem - powers_[i]);
      if (out.size() >= limit) return;
    }
  };
  visit(visit, 0, 0, n);
  return out;
}

u64 count_exact(const RepresentationQuery& query) {
  return ExactCounter(query.k, query.s, query.lo, query.hi).count(query.n);
}

ConvolutionCounts count_convolution(int k, int s, u64 lo, u64 hi, u64 n_lo, u64 n_hi, u64 memory_budget) {
  if (s < 1) throw Error(Errc::precondition, "s must be positive");
  if (n_hi < n_lo) throw Error(Errc::precondition, "empty n range");
  if (n_hi - n_lo + 1 > 1'000'000'000 / static_cast<u64>(s)) {
    throw Error(Errc::resource, "n range longer than 10^9/s");
  }
  ConvolutionCounts out;
  out.n_lo = n_lo;
  out.n_hi = n_hi;
  out.counts.assign(n_hi - n_lo + 1, 0);
  std::vector<u64> primes = primes_in_open_closed(lo, hi);
  if (primes.empty()) return out;

  std::vector<u64> powers;
  for (u64 p : primes) powers.push_back(checked_pow(p, static_cast<unsigned>(k)));
  const u64 base = powers.front();
  const u64 span = powers.back() - base;
  const u64 sbase = checked_mul(base, static_cast<u64>(s));
  const u64 full_max = sbase + span * static_cast<u64>(s);
  if (n_hi < sbase || n_lo > full_max) return out;

  u64 first = std::max(n_lo, sbase), last = std::min(n_hi, full_max);
  if (span > (u64{1} << 32)) throw Error(Errc::resource, "prime power span too wide for the transform");
  std::vector<std::uint8_t> indicator(span + 1, 0);
  for (u64 v : powers) indicator[v - base] = 1;
  ConvolutionPower power = self_convolution_power(indicator, s, first - sbase, last - sbase, memory_budget);
  for (u64 n = first; n <= last; ++n) out.counts[n - n_lo] = power.counts[n - first];
  out.exact_fallback = power.exact_fallback;
  out.max_residual = power.max_residual;
  return out;
}

ConvolutionValue convolution_at(const std::vector<WeightTable>& tables, u64 n0) {
  if (tables.empty()) throw Error(Errc::precondition, "no tables");
  const u64 N = tables.front().N;
  const std::size_t s = tables.size();
  for (const auto& t : tables) {
    if (t.N != N) throw Error(Errc::precondition, "tables must share one length");
  }
  if (n0 == 0 || n0 > s * N) throw Error(Errc::precondition, "n0 must lie in [1, sN]");

  std::size_t G = smooth_size(s * N + 1);
  std::vector<std::complex<double>> product;
  bool integral = true;
  double mass = 1;
  for (const auto& t : tables) {
    std::vector<double> signal(N + 1, 0.0);
    std::copy(t.values.begin(), t.values.end(), signal.begin() + 1);
    double l1 = 0;
    for (double v : t.values) {
      l1 += std::abs(v);
      if (v != std::floor(v)) integral = false;
    }
    mass *= l1;
    auto half = forward_half_spectrum(signal, G);
    if (product.empty()) {
      product = std::move(half);
    } else {
      for (std::size_t j = 0; j < product.size(); ++j) product[j] *= half[j];
    }
  }
  std::vector<double> conv = inverse_half_spectrum(product, G);
  ConvolutionValue v;
  v.raw = conv[n0];
  v.rounding_bound = mass * 0x1p-52 * std::log2(static_cast<double>(G)) * static_cast<double>(s);
  if (integral) {
    v.raw = std::nearbyint(v.raw);
    v.integral = true;
  }
  v.normalized = v.raw / std::pow(static_cast<double>(N), static_cast<double>(s - 1));
  return v;
}

std::vector<u64> subdivide_range(u64 M, int k, int s, double theta) {
  if (k < 2) throw Error(Errc::precondition, "k must be at least 2");
  if (s < 1) throw Error(Errc::precondition, "s must be positive");
  if (!(theta > 0 && theta < 1)) throw Error(Errc::precondition, "theta must lie in (0, 1)");
  const long double e = (k - 1 + static_cast<long double>(theta)) / k;
  auto step = [&](u64 Mi) { return std::pow(static_cast<long double>(Mi) / s, e); };
  if (M < 2 || step(M) < 1) throw Error(Errc::precondition, "M too small for the subdivision");
  std::vector<u64> seq{M};
  while (2 * seq.back() > M) {
    u64 Mi = seq.back();
    auto next = static_cast<u64>(std::floor(static_cast<long double>(Mi) - step(Mi)));
    if (next >= Mi) next = Mi - 1;
    seq.push_back(next);
  }
  return seq;
}

double subdivision_bound(u64 M, int k, double theta) {
  double m = static_cast<double>(M);
  return std::log(m) * std::pow(m, (1.0 - theta) / k);
}

std::vector<ResidueClassSetup> residue_setup(u64 M_i, int k, int s, double theta, u64 W) {
  if (W == 0) throw Error(Errc::precondition, "W must be positive");
  const u64 R = waring_goldbach_modulus(k).R_k;
  long double step = std::pow(static_cast<long double>(M_i) / s, (k - 1 + static_cast<long double>(theta)) / k);
  long double lower = static_cast<long double>(M_i) - step;
  u64 n_min = lower < 0 ? 1 : static_cast<u64>(std::floor(lower)) + 1;
  const u64 target = static_cast<u64>(s) % R;
  std::vector<ResidueClassSetup> out;
  for (u64 l = 0; l < W; ++l) {
    u64 n = n_min + (l + W - n_min % W) % W;
    u64 tries = 0;
    while (n <= M_i && n % R != target && tries < R) {
      n += W;
      ++tries;
    }
    if (n > M_i || n % R != target) continue;
    ResidueClassSetup cls;
    cls.l = l;
    cls.n_l = n;
    try {
      cls.b = decompose_residue(n, W, k, s);
    } catch (const Error& e) {
      if (e.code() != Errc::unsolvable) throw;
      cls.flagged = true;
    }
    out.push_back(std::move(cls));
  }
  return out;
}

std::pair<u64, u64> prime_window(u64 n, int k, int s, double theta) {
  long double c = std::pow(static_cast<long double>(n) / s, 1.0L / k);
  long double r = std::pow(static_cast<long double>(n), static_cast<long double>(theta) / k);
  long double lo = std::floor(c - r);
  return {lo < 0 ? 0 : static_cast<u64>(lo), static_cast<u64>(std::floor(c + r))};
}

std::vector<PrimeWindowRun> prime_window_runs(u64 n_lo, u64 n_hi, int k, int s, double theta) {
  std::vector<PrimeWindowRun> runs;
  if (n_hi < n_lo) return runs;
  // both window ends increase with n
  u64 lo_min = prime_window(n_lo, k, s, theta).first;
  u64 hi_max = prime_window(n_hi, k, s, theta).second;
  std::vector<u64> primes = primes_in_open_closed(lo_min, hi_max);
  auto key = [&](std::pair<u64, u64> w) {
    auto a = std::upper_bound(primes.begin(), primes.end(), w.first) - primes.begin();
    auto b = std::upper_bound(primes.begin(), primes.end(), w.second) - primes.begin();
    return std::pair{a, b};
  };
  for (u64 n = n_lo; n <= n_hi; ++n) {
    auto w = prime_window(n, k, s, theta);
    auto kk = key(w);
    if (!runs.empty() && key({runs.back().lo, runs.back().hi}) == kk) {
      runs.back().n_last = n;
    } else {
      runs.push_back({n, n, w.first, w.second});
    }
    if (n == n_hi) break;
  }
  return runs;
}

namespace {

SubintervalInfo subinterval_info(u64 M_i, int k, int s, double theta, u64 W) {
  SubintervalInfo info;
  info.M_i = M_i;
  long double x = std::pow(static_cast<long double>(M_i) / s, 1.0L / k);
  long double xt = std::pow(x, static_cast<long double>(theta));
  info.x = static_cast<double>(x);
  long double base = x - xt / (static_cast<long double>(s) * k);
  info.m = base <= 0 ? 0 : static_cast<u64>(std::floor(std::pow(base, static_cast<long double>(k)) / W));
  info.N = window_length(k, s, theta, W, M_i);
  return info;
}

}  // namespace

ScanReport scan_exceptional(const ScanRequest& req) {
  auto start = std::chrono::steady_clock::now();
  if (req.k < 2) throw Error(Errc::precondition, "k must be at least 2");
  if (req.s < 2) throw Error(Errc::precondition, "s must be at least 2");
  if (!(req.theta > 0.5 && req.theta < 1.0)) throw Error(Errc::precondition, "theta must lie in (1/2, 1)");
  if (req.M < 16) throw Error(Errc::precondition, "M too small");

  ScanReport rep;
  rep.M = req.M;
  rep.k = req.k;
  rep.s = req.s;
  rep.theta = req.theta;
  rep.W = req.W_override ? *req.W_override : w_trick_modulus(req.k, req.w);
  rep.R_k = waring_goldbach_modulus(req.k).R_k;
  if (req.s <= req.k * (req.k + 1) / 2) {
    rep.warnings.push_back("s <= k(k+1)/2: outside the regime where every admissible residue is locally solvable");
  }
  rep.warnings.push_back("W omits the [1/varrho]!^2 factor (W = " + std::to_string(rep.W) + ")");

  std::vector<u64> subs = subdivide_range(req.M, req.k, req.s, req.theta);
  rep.subdivision_length = subs.size();
  rep.subdivision_bound = subdivision_bound(req.M, req.k, req.theta);

  // admissible n: n = s (mod R_k)
  const u64 R = rep.R_k;
  const u64 res = static_cast<u64>(req.s) % R;
  auto first_admissible_from = [&](u64 n) { return n + (res + R - n % R) % R; };
  const u64 half = req.M / 2;
  const u64 adm_first = first_admissible_from(half + 1);
  const u64 adm_total = adm_first > req.M ? 0 : (req.M - adm_first) / R + 1;

  u64 begin;
  if (req.window_begin) {
    begin = first_admissible_from(*req.window_begin);
  } else {
    std::mt19937_64 rng(req.seed);
    u64 slack = adm_total > req.window_count ? adm_total - req.window_count : 0;
    u64 offset = slack == 0 ? 0 : rng() % (slack + 1);
    begin = adm_first + offset * R;
  }
  u64 count = 0;
  if (begin <= req.M && req.window_count > 0) count = std::min(req.window_count, (req.M - begin) / R + 1);
  if (count < req.window_count) rep.warnings.push_back("window truncated at M");
  rep.window_begin = begin;
  rep.window_end = count ? begin + (count - 1) * R : begin;
  rep.tested = count;
  rep.coverage = adm_total ? static_cast<double>(count) / static_cast<double>(adm_total) : 0.0;

  if (count == 0) {
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  }

  // subdivision bookkeeping: which M_i owns each n, and its n_0
  std::map<std::size_t, std::pair<SubintervalInfo, std::vector<ResidueClassSetup>>> used;
  for (u64 i = 0; i < count; ++i) {
    u64 n = begin + i * R;
    // subs is descending; owner is the last M_i >= n with the next term < n
    auto it = std::lower_bound(subs.begin(), subs.end(), n, [](u64 a, u64 b) { return a >= b; });
    if (it == subs.begin()) continue;  // n > M
    std::size_t idx = static_cast<std::size_t>(it - subs.begin()) - 1;
    if (idx + 1 >= subs.size() && n <= subs.back()) continue;
    auto found = used.find(idx);
    if (found == used.end()) {
      SubintervalInfo info = subinterval_info(subs[idx], req.k, req.s, req.theta, rep.W);
      auto setup = residue_setup(subs[idx], req.k, req.s, req.theta, rep.W);
      for (const auto& c : setup) rep.flagged_classes += c.flagged;
      found = used.emplace(idx, std::pair{info, std::move(setup)}).first;
    }
    const auto& [info, setup] = found->second;
    auto cls = std::find_if(setup.begin(), setup.end(), [&](const auto& c) { return c.l == n % rep.W; });
    if (cls == setup.end() || cls->flagged) continue;
    i64 bsum = 0;
    for (u64 b : cls->b) bsum += static_cast<i64>(b);
    __int128 num = static_cast<__int128>(n) - bsum - static_cast<__int128>(req.s) * info.m * rep.W;
    __int128 n0 = num / static_cast<__int128>(rep.W);
    if (n0 > 0 && n0 <= info.N) ++rep.n0_in_range; else ++rep.n0_out_of_range;
  }
  for (const auto& [idx, v] : used) rep.subintervals.push_back(v.first);

  std::vector<PrimeWindowRun> runs = prime_window_runs(rep.window_begin, rep.window_end, req.k, req.s, req.theta);
  rep.convolution_runs = runs.size();
  std::vector<std::vector<u64>> zero_hits(runs.size());
  std::vector<char> fallback(runs.size(), 0);
  unsigned workers = std::max(1u, req.workers);
  u64 budget = req.memory_budget / workers;
  parallel_for(runs.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const auto& run = runs[r];
      ConvolutionCounts cc = count_convolution(req.k, req.s, run.lo, run.hi, run.n_first, run.n_last, budget);
      fallback[r] = cc.exact_fallback;
      for (u64 n = first_admissible_from(run.n_first); n <= run.n_last; n += R) {
        if (cc.at(n) == 0) zero_hits[r].push_back(n);
      }
    }
  });
  for (std::size_t r = 0; r < runs.size(); ++r) {
    rep.exact_fallback_runs += fallback[r];
    if (zero_hits[r].empty()) continue;
    ExactCounter exact(req.k, req.s, runs[r].lo, runs[r].hi, req.memory_budget);
    for (u64 n : zero_hits[r]) {
      if (exact.count(n) == 0) rep.exceptional.push_back(n); else rep.unconfirmed.push_back(n);
    }
  }
  rep.density = static_cast<double>(rep.exceptional.size()) / static_cast<double>(rep.tested);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace wgl
