// Acceptance suite: one PASS/FAIL line per criterion. Every criterion also
// has a wall-clock limit; exceeding it fails the criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wgl/arith.hpp"
#include "wgl/fourier.hpp"
#include "wgl/local_arith.hpp"
#include "wgl/prime_tools.hpp"
#include "wgl/representation.hpp"
#include "wgl/selberg_sieve.hpp"

using namespace wgl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ContextRequest desk_request() {
  ContextRequest req;
  req.k = 2;
  req.s = 4;
  req.theta = 0.75;
  req.delta = 0.3;
  req.W_override = 24;
  return req;
}

// Histogram of y_1^k + ... + y_s^k mod q over units y_i, built one summand
// at a time; small q also gets a literal enumeration.
std::vector<u64> unit_power_histogram(u64 q, int k, int s) {
  std::vector<u64> single(q, 0);
  for (u64 y = 1; y < q; ++y) {
    if (std::gcd(y, q) != 1) continue;
    u64 v = 1;
    for (int i = 0; i < k; ++i) v = v * y % q;
    ++single[v];
  }
  std::vector<u64> acc = single;
  for (int j = 1; j < s; ++j) {
    std::vector<u64> next(q, 0);
    for (u64 a = 0; a < q; ++a) {
      if (!acc[a]) continue;
      for (u64 b = 0; b < q; ++b) {
        if (single[b]) next[(a + b) % q] += acc[a] * single[b];
      }
    }
    acc.swap(next);
  }
  return acc;
}

std::vector<u64> unit_power_enumeration(u64 q, int k, int s) {
  std::vector<u64> units;
  for (u64 y = 1; y < q; ++y) {
    if (std::gcd(y, q) == 1) units.push_back(y);
  }
  std::vector<u64> pw;
  for (u64 y : units) {
    u64 v = 1;
    for (int i = 0; i < k; ++i) v = v * y % q;
    pw.push_back(v);
  }
  std::vector<u64> hist(q, 0);
  std::vector<std::size_t> idx(s, 0);
  while (true) {
    u64 sum = 0;
    for (int i = 0; i < s; ++i) sum += pw[idx[i]];
    ++hist[sum % q];
    int i = 0;
    while (i < s && ++idx[i] == pw.size()) idx[i++] = 0;
    if (i == s) break;
  }
  return hist;
}

Outcome local_constants() {
  const u64 expected[] = {24, 2, 240, 2, 504};
  std::string bad;
  for (int k = 2; k <= 6; ++k) {
    u64 R = waring_goldbach_modulus(k).R_k;
    if (R != expected[k - 2]) bad += fmt(" R_%d=%llu", k, static_cast<unsigned long long>(R));
    u64 checked = 0;
    for (u64 p = 2; checked < 1000; ++p) {
      if (!is_prime(p) || R % p == 0) continue;
      ++checked;
      if (powmod(p, static_cast<u64>(k), R) != 1) bad += fmt(" p=%llu,k=%d", static_cast<unsigned long long>(p), k);
    }
  }
  return {bad.empty(), bad.empty() ? "R_2..R_6 = 24 2 240 2 504; p^k = 1 (mod R_k) for 1000 primes each" : "mismatch:" + bad};
}

Outcome lifting_oracle() {
  u64 cases = 0, mismatches = 0;
  for (u64 p : {3u, 5u, 7u, 11u, 13u}) {
    for (int k : {2, 3}) {
      for (int s : {4, 5}) {
        u64 q = p;
        for (int t = 1; q <= 3000; ++t, q *= p) {
          std::vector<u64> oracle = unit_power_histogram(q, k, s);
          if (std::pow(static_cast<double>(q), s) <= 2e6) {
            if (unit_power_enumeration(q, k, s) != oracle) ++mismatches;
          }
          for (u64 m = 0; m < q; ++m) {
            ++cases;
            if (lift_prime_power(p, t, m, k, s) != static_cast<Count>(oracle[m])) ++mismatches;
          }
        }
      }
    }
  }
  return {mismatches == 0, fmt("%llu (p,t,k,s,m) cases, %llu mismatches", static_cast<unsigned long long>(cases),
                               static_cast<unsigned long long>(mismatches))};
}

Outcome local_positivity() {
  u64 checked = 0, violations = 0;
  std::string first;
  std::string by_k;
  for (int k : {2, 3, 4}) {
    int s = k * (k + 1) / 2 + 1;
    u64 R = waring_goldbach_modulus(k).R_k;
    u64 vk = 0;
    for (u64 h = 1; h <= 500; ++h) {
      u64 g = std::gcd(h, R);
      std::vector<Count> dist = unit_solution_distribution(h, k, s);
      for (u64 m = 0; m < h; ++m) {
        if (m % g != static_cast<u64>(s) % g) continue;
        ++checked;
        if (dist[m] == 0) {
          ++vk;
          if (first.size() < 120) first += fmt(" (k=%d,h=%llu,m=%llu)", k, static_cast<unsigned long long>(h), static_cast<unsigned long long>(m));
        }
      }
    }
    violations += vk;
    by_k += fmt(" k=%d:%llu", k, static_cast<unsigned long long>(vk));
  }
  std::string detail = fmt("%llu admissible (h,m), %llu with no unit solution;", static_cast<unsigned long long>(checked),
                           static_cast<unsigned long long>(violations)) + by_k;
  if (violations) detail += "; first:" + first;
  return {violations == 0, detail};
}

Outcome selberg_identity() {
  double worst = 0;
  bool ok = true;
  for (auto [z, W] : {std::pair{50.0, u64{2}}, {100.0, u64{6}}, {200.0, u64{30}}}) {
    SieveWeights w = selberg_weights(z, W);
    long double form = 0;
    for (std::size_t i = 0; i < w.support.size(); ++i) {
      for (std::size_t j = 0; j < w.support.size(); ++j) {
        u64 l = std::lcm(w.support[i], w.support[j]);
        form += static_cast<long double>(w.rho[i]) * w.rho[j] / static_cast<long double>(l);
      }
    }
    double rel = static_cast<double>(std::abs(form * w.J - 1));
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-12 && w.rho_of(1) == 1.0 &&
         std::all_of(w.rho.begin(), w.rho.end(), [](double r) { return std::abs(r) <= 1.0; });
  }
  return {ok, fmt("worst relative error %.3g over (50,2) (100,6) (200,30); rho_1 = 1, |rho_d| <= 1", worst)};
}

Outcome majorization() {
  ContextRequest req = desk_request();
  req.M_i = 400'000'000;
  WTrickContext c = build_context(req);
  SieveWeights w = selberg_weights(c.z, c.W, &c);
  WeightTable f = build_f_b(c, w), v = build_v_b(c, w);
  u64 violations = 0;
  for (u64 i = 0; i < c.N; ++i) violations += v.values[i] < f.values[i];
  return {violations == 0, fmt("X=%llu N=%llu z=%.3f: %llu violations; sum f/N=%.4f, alpha+=%.4f",
                               static_cast<unsigned long long>(c.X), static_cast<unsigned long long>(c.N), c.z,
                               static_cast<unsigned long long>(violations), f.sum() / static_cast<double>(c.N),
                               *w.alpha_plus)};
}

Outcome factored_transform() {
  ContextRequest req = desk_request();
  req.M_i = 400'000'000;
  WTrickContext c = build_context(req);
  SieveWeights w = selberg_weights(c.z, c.W, &c);
  WeightTable v = build_v_b(c, w);
  auto roots = table_roots(c);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<long double> u(0, 1);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    long double a = u(rng);
    worst = std::max(worst, std::abs(dft_at(v, a) - factored_vhat(c, w, a, roots)) / static_cast<double>(c.N));
  }
  return {worst <= 1e-8, fmt("max |v^ - factored| / N = %.3g at 50 alpha (N=%llu)", worst,
                             static_cast<unsigned long long>(c.N))};
}

const u64 kLengths[] = {10'000, 100'000, 1'000'000};

Outcome pseudorandomness_trend() {
  std::vector<double> grid, refined;
  std::string detail;
  for (u64 n : kLengths) {
    WTrickContext c = context_for_length(desk_request(), n);
    SieveWeights w = selberg_weights(c.z, c.W, &c);
    ArcDissection arcs = make_dissection(c.X, c.Y, 1.0);
    PseudorandomnessReport r = pseudorandomness_report(c, w, arcs);
    grid.push_back(r.grid_sup);
    refined.push_back(r.sup_all);
    detail += fmt(" N=%llu: grid %.4f, refined %.4f at %.6f;", static_cast<unsigned long long>(n), r.grid_sup,
                  r.sup_all, r.argmax_alpha);
  }
  bool decreasing = grid[0] > grid[1] && grid[1] > grid[2];
  bool small = grid[2] < 0.2;
  detail += fmt(" strictly decreasing: %s; < 0.2 at 10^6: %s", decreasing ? "yes" : "no", small ? "yes" : "no");
  return {decreasing && small, detail};
}

Outcome restriction_boundedness() {
  std::vector<double> ratios;
  std::string detail;
  const double q = 2 * 4 - 0.5;
  for (u64 n : kLengths) {
    WTrickContext c = context_for_length(desk_request(), n);
    SieveWeights w = selberg_weights(c.z, c.W, &c);
    RestrictionNorm rn = restriction_norm(build_f_b(c, w), q);
    ratios.push_back(rn.ratio);
    detail += fmt(" N=%llu: %.4f;", static_cast<unsigned long long>(n), rn.ratio);
  }
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  double variation = *hi / *lo - 1;
  detail += fmt(" variation max/min - 1 = %.3f", variation);
  return {variation < 0.5, "q=7.5:" + detail};
}

Outcome counter_equivalence() {
  const u64 n_hi = 100'000'000, n_lo = n_hi - 100'000 + 1;
  u64 mismatches = 0, zeros = 0, fallbacks = 0;
  auto runs = prime_window_runs(n_lo, n_hi, 2, 4, 0.75);
  for (const auto& run : runs) {
    ConvolutionCounts cc = count_convolution(2, 4, run.lo, run.hi, run.n_first, run.n_last);
    fallbacks += cc.exact_fallback;
    ExactCounter ec(2, 4, run.lo, run.hi);
    for (u64 n = run.n_first; n <= run.n_last; ++n) {
      u64 e = ec.count(n);
      mismatches += e != cc.at(n);
      zeros += e == 0 && n % 24 == 4;
    }
  }
  return {mismatches == 0, fmt("n in [%llu, %llu], %zu prime window(s), %llu exact fallback(s): %llu mismatches "
                               "(%llu admissible n with count 0)",
                               static_cast<unsigned long long>(n_lo), static_cast<unsigned long long>(n_hi), runs.size(),
                               static_cast<unsigned long long>(fallbacks), static_cast<unsigned long long>(mismatches),
                               static_cast<unsigned long long>(zeros))};
}

// Runs the scan, then recomputes the zero set of the whole window with the
// exact counter and compares.
Outcome scan_with_oracle(int s, double theta, bool require_empty) {
  ScanRequest req;
  req.M = 100'000'000;
  req.k = 2;
  req.s = s;
  req.theta = theta;
  req.window_begin = req.M - 24 * 10'000 + 1;
  req.window_count = 10'000;
  ScanReport r = scan_exceptional(req);

  std::vector<u64> oracle;
  for (const auto& run : prime_window_runs(r.window_begin, r.window_end, 2, s, theta)) {
    ExactCounter ec(2, s, run.lo, run.hi);
    u64 n = run.n_first + (static_cast<u64>(s) % 24 + 24 - run.n_first % 24) % 24;
    for (; n <= run.n_last; n += 24) {
      if (ec.count(n) == 0) oracle.push_back(n);
    }
  }
  bool agree = oracle == r.exceptional && r.unconfirmed.empty();
  std::string detail = fmt("M=10^8, s=%d, theta=%.2f, W=%llu: tested %llu in [%llu, %llu], %zu exception(s), "
                           "density %.4g, n0 in range %llu/%llu, exact oracle agreement %s",
                           s, theta, static_cast<unsigned long long>(r.W), static_cast<unsigned long long>(r.tested),
                           static_cast<unsigned long long>(r.window_begin), static_cast<unsigned long long>(r.window_end),
                           r.exceptional.size(), r.density.value_or(-1.0), static_cast<unsigned long long>(r.n0_in_range),
                           static_cast<unsigned long long>(r.tested), agree ? "100%" : "BROKEN");
  for (std::size_t i = 0; i < r.exceptional.size() && i < 5; ++i) {
    detail += fmt(" %llu", static_cast<unsigned long long>(r.exceptional[i]));
  }
  bool ok = r.tested == 10'000 && agree && (!require_empty || r.exceptional.empty());
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "local constants", 1, local_constants},
      {2, "lifting oracle", 60, lifting_oracle},
      {3, "local positivity", 60, local_positivity},
      {4, "Selberg identity", 10, selberg_identity},
      {5, "majorization", 120, majorization},
      {6, "factored transform", 120, factored_transform},
      {7, "pseudorandomness trend", 900, pseudorandomness_trend},
      {8, "restriction boundedness", 900, restriction_boundedness},
      {9, "counter equivalence", 600, counter_equivalence},
      {10, "scan s=7 theta=0.7", 1800, [] { return scan_with_oracle(7, 0.7, true); }},
      {11, "scan s=4 theta=0.75", 1800, [] { return scan_with_oracle(4, 0.75, false); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_seconds;
    bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%2d] %s: %s (%.1f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
