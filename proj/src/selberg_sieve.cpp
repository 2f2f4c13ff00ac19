#include "wgl/selberg_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "wgl/error.hpp"
#include "wgl/local_arith.hpp"
#include "wgl/parallel.hpp"

namespace wgl {

namespace {

constexpr double kMaxSieveLevel = 1e5;
constexpr u64 kMaxRootValue = u64{1} << 62;

// Largest integer strictly below z.
u64 below(double z) {
  double f = std::floor(z);
  u64 d = f < 1.0 ? 0 : static_cast<u64>(f);
  if (static_cast<double>(d) >= z && d > 0) --d;
  return d;
}

struct Arithmetic {
  std::vector<int> mu;
  std::vector<u64> phi;
};

// Linear sieve for mu and phi on [0, limit].
Arithmetic arithmetic_functions(u64 limit) {
  Arithmetic a;
  a.mu.assign(limit + 1, 1);
  a.phi.resize(limit + 1);
  std::iota(a.phi.begin(), a.phi.end(), u64{0});
  std::vector<char> composite(limit + 1, 0);
  std::vector<u64> primes;
  a.mu[0] = 0;
  for (u64 i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      a.mu[i] = -1;
      a.phi[i] = i - 1;
    }
    for (u64 p : primes) {
      if (i * p > limit) break;
      composite[i * p] = 1;
      if (i % p == 0) {
        a.mu[i * p] = 0;
        a.phi[i * p] = a.phi[i] * p;
        break;
      }
      a.mu[i * p] = -a.mu[i];
      a.phi[i * p] = a.phi[i] * (p - 1);
    }
  }
  return a;
}

void validate_level(double z) {
  if (!(z >= 1.0)) throw Error(Errc::precondition, "sieve level z must be >= 1");
  if (z > kMaxSieveLevel) throw Error(Errc::resource, "sieve level z exceeds 10^5");
}

long double powl_safe(long double base, int k) {
  long double r = 1;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

}  // namespace

u64 w_trick_modulus(int k, double w) {
  if (k < 1) throw Error(Errc::precondition, "k must be positive");
  u64 W = checked_mul(2, checked_mul(static_cast<u64>(k), static_cast<u64>(k)));
  if (w >= 2.0) {
    for (u64 p : primes_up_to(static_cast<u64>(std::floor(w)))) W = checked_mul(W, p);
  }
  return W;
}

u64 w_trick_modulus_full(int k, double w, double varrho) {
  if (!(varrho > 0.0)) throw Error(Errc::precondition, "varrho must be positive");
  u64 W = w_trick_modulus(k, w);
  auto top = static_cast<u64>(std::floor(1.0 / varrho));
  u64 fact = 1;
  for (u64 i = 2; i <= top; ++i) fact = checked_mul(fact, i);
  return checked_mul(W, checked_mul(fact, fact));
}

i64 window_length(int k, int s, double theta, u64 W, u64 M_i) {
  long double x = std::pow(static_cast<long double>(M_i) / s, 1.0L / k);
  long double xt = std::pow(x, static_cast<long double>(theta));
  long double upper_base = x + xt - static_cast<long double>(W);
  long double lower_base = x - xt / s;
  if (upper_base <= lower_base || lower_base <= 0) return -1;
  long double upper = powl_safe(upper_base, k);
  long double lower = powl_safe(lower_base, k);
  long double n = std::floor((upper - lower) / static_cast<long double>(W));
  if (n < 0) return -1;
  return static_cast<i64>(n);
}

WTrickContext build_context(const ContextRequest& req) {
  if (req.k < 2) throw Error(Errc::precondition, "k must be at least 2");
  if (req.s <= req.k) throw Error(Errc::precondition, "s must exceed k");
  if (!(req.theta > 0.5 && req.theta < 1.0)) throw Error(Errc::precondition, "theta must lie in (1/2, 1)");
  double delta = req.delta > 0.0 ? req.delta : 0.9 * req.theta / req.k;
  if (delta >= req.theta / req.k) {
    throw Error(Errc::delta_too_large, "delta must be below theta/k");
  }
  if (req.M_i == 0) throw Error(Errc::precondition, "M_i must be positive");

  WTrickContext ctx;
  ctx.k = req.k;
  ctx.s = req.s;
  ctx.theta = req.theta;
  ctx.delta = delta;
  ctx.varrho = req.varrho;
  ctx.w = req.w;
  ctx.W = req.W_override ? *req.W_override : w_trick_modulus(req.k, req.w);
  ctx.W_overridden = req.W_override.has_value();
  if (ctx.W == 0) throw Error(Errc::precondition, "W must be positive");
  ctx.M_i = req.M_i;

  long double x = std::pow(static_cast<long double>(req.M_i) / req.s, 1.0L / req.k);
  long double xt = std::pow(x, static_cast<long double>(req.theta));
  ctx.x = static_cast<double>(x);
  long double mbase = x - xt / (static_cast<long double>(req.s) * req.k);
  if (mbase <= 0) throw Error(Errc::nonpositive_n, "window base is not positive");
  ctx.m = static_cast<u64>(std::floor(powl_safe(mbase, req.k) / static_cast<long double>(ctx.W)));
  i64 n = window_length(req.k, req.s, req.theta, ctx.W, req.M_i);
  if (n <= 0) throw Error(Errc::nonpositive_n, "parameters give an empty window (N <= 0)");
  ctx.N = static_cast<u64>(n);

  ctx.b = 1;
  ctx.X = checked_mul(ctx.W, ctx.m) + 1;
  ctx.Y = checked_mul(ctx.W, ctx.N);
  ctx.z = std::pow(static_cast<double>(ctx.X), delta / 2.0);
  ctx.D = ctx.z * ctx.z;

  double e = 1.0 - 1.0 / req.k + req.theta / req.k;
  double predicted = static_cast<double>(req.k * req.s + req.k) / req.s * std::pow(static_cast<double>(ctx.X), e);
  ctx.xy_ratio = static_cast<double>(ctx.Y) / predicted;
  if (ctx.xy_ratio < 0.8 || ctx.xy_ratio > 1.25) {
    throw Error(Errc::precondition, "Y/X scale relation out of band (ratio " + std::to_string(ctx.xy_ratio) + ")");
  }
  return with_residue(ctx, req.b);
}

WTrickContext context_for_length(ContextRequest req, u64 n_target) {
  if (n_target == 0) throw Error(Errc::nonpositive_n, "target N must be positive");
  u64 W = req.W_override ? *req.W_override : w_trick_modulus(req.k, req.w);
  auto length = [&](u64 M) { return window_length(req.k, req.s, req.theta, W, M); };
  u64 hi = static_cast<u64>(req.s);
  while (length(hi) < static_cast<i64>(n_target)) {
    if (hi > (u64{1} << 60)) throw Error(Errc::overflow, "target N unreachable");
    hi *= 2;
  }
  u64 lo = hi / 2;
  // smallest M with N(M) >= target; N grows by less than one per unit step
  while (lo + 1 < hi) {
    u64 mid = lo + (hi - lo) / 2;
    if (length(mid) >= static_cast<i64>(n_target)) hi = mid; else lo = mid;
  }
  if (length(hi) != static_cast<i64>(n_target)) {
    throw Error(Errc::precondition, "no M_i gives N = " + std::to_string(n_target));
  }
  req.M_i = hi;
  return build_context(req);
}

WTrickContext with_residue(const WTrickContext& ctx, u64 b) {
  if (b == 0 || b > ctx.W) throw Error(Errc::precondition, "b must lie in [1, W]");
  if (std::gcd(b, ctx.W) != 1) throw Error(Errc::coprimality, "gcd(b, W) must be 1");
  WTrickContext out = ctx;
  out.b = b;
  out.X = checked_mul(ctx.W, ctx.m) + b;
  if (out.X + out.Y >= kMaxRootValue) throw Error(Errc::overflow, "X + Y exceeds 2^62");
  return out;
}

double compute_J(double z, u64 W) {
  if (!(z >= 1.0)) throw Error(Errc::precondition, "z must be >= 1");
  validate_level(z);
  u64 top = below(z);
  Arithmetic a = arithmetic_functions(top);
  long double J = 0;
  for (u64 d = 1; d <= top; ++d) {
    if (a.mu[d] != 0 && std::gcd(d, W) == 1) J += 1.0L / a.phi[d];
  }
  return static_cast<double>(J);
}

SieveWeights selberg_weights(double z, u64 W, const WTrickContext* ctx) {
  validate_level(z);
  if (W == 0) throw Error(Errc::precondition, "W must be positive");
  SieveWeights sw;
  sw.z = z;
  sw.W = W;
  u64 top = below(z);
  Arithmetic a = arithmetic_functions(top);

  std::vector<char> admissible(top + 1, 0);
  for (u64 d = 1; d <= top; ++d) admissible[d] = a.mu[d] != 0 && std::gcd(d, W) == 1;

  long double J = 0;
  for (u64 d = 1; d <= top; ++d) {
    if (admissible[d]) {
      J += 1.0L / a.phi[d];
      sw.support.push_back(d);
      if (a.mu[d] == -1) sw.sieve_primes.push_back(d);
    }
  }
  sw.J = static_cast<double>(J);
  sw.rho_by_d.assign(top + 1, 0.0);
  sw.rho.reserve(sw.support.size());
  for (u64 d : sw.support) {
    long double inner = 0;
    for (u64 e = 1; e <= top / d; ++e) {
      if (admissible[e] && std::gcd(e, d) == 1) inner += 1.0L / a.phi[e];
    }
    long double r = a.mu[d] * static_cast<long double>(d) / a.phi[d] * inner / J;
    sw.rho.push_back(static_cast<double>(r));
    sw.rho_by_d[d] = static_cast<double>(r);
  }
  if (ctx) sw.alpha_plus = alpha_plus(*ctx, sw).value;
  return sw;
}

double diagonal_form(const SieveWeights& weights) {
  long double total = 0;
  const auto& S = weights.support;
  for (std::size_t i = 0; i < S.size(); ++i) {
    long double row = 0;
    for (std::size_t j = 0; j < S.size(); ++j) {
      u64 g = std::gcd(S[i], S[j]);
      long double lcm = static_cast<long double>(S[i] / g) * S[j];
      row += weights.rho[j] / lcm;
    }
    total += weights.rho[i] * row;
  }
  return static_cast<double>(total);
}

AlphaPlus alpha_plus(const WTrickContext& ctx, const SieveWeights& weights) {
  AlphaPlus out;
  double phiW = static_cast<double>(euler_phi(ctx.W));
  out.value = phiW * std::log(static_cast<double>(ctx.X)) /
              (static_cast<double>(ctx.k) * static_cast<double>(ctx.W) * weights.J);
  out.reference = 2.0 / (ctx.k * ctx.delta);
  out.ratio = out.value / out.reference;
  return out;
}

double rho_plus(u64 t, const SieveWeights& weights) {
  if (t == 0) throw Error(Errc::precondition, "rho_plus: t must be >= 1");
  // Squarefree divisors of t built from sieve primes, pruned at z.
  std::vector<u64> divisors{1};
  u64 top = weights.rho_by_d.empty() ? 0 : weights.rho_by_d.size() - 1;
  for (u64 p : weights.sieve_primes) {
    if (t % p != 0) continue;
    std::size_t n = divisors.size();
    for (std::size_t i = 0; i < n; ++i) {
      u64 d = divisors[i] * p;
      if (d <= top) divisors.push_back(d);
    }
  }
  double sum = 0;
  for (u64 d : divisors) sum += weights.rho_of(d);
  return sum * sum;
}

const char* to_string(TableKind kind) {
  switch (kind) {
    case TableKind::prime_power_f: return "PRIME_POWER_F";
    case TableKind::majorant_v: return "MAJORANT_V";
    case TableKind::indicator: return "INDICATOR";
    case TableKind::signed_difference: return "SIGNED_DIFFERENCE";
  }
  return "UNKNOWN";
}

double WeightTable::sum() const {
  long double s = 0;
  for (double v : values) s += v;
  return static_cast<double>(s);
}

std::vector<u64> WeightTable::support() const {
  std::vector<u64> out;
  for (u64 i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) out.push_back(i + 1);
  }
  return out;
}

WeightTable indicator_table(u64 N) {
  return WeightTable{N, std::vector<double>(N, 1.0), TableKind::indicator};
}

std::vector<Root> table_roots(const WTrickContext& ctx, unsigned workers) {
  const u64 W = ctx.W;
  const auto k = static_cast<unsigned>(ctx.k);
  if (ctx.X + ctx.Y >= kMaxRootValue) throw Error(Errc::overflow, "X + Y exceeds 2^62");
  if (W > (u64{1} << 32)) throw Error(Errc::resource, "W too large to enumerate root classes");

  std::vector<u64> classes;
  for (u64 z0 = 0; z0 < W; ++z0) {
    if (powmod(z0, k, W) == ctx.b % W) classes.push_back(z0);
  }
  u64 t_min = iroot(ctx.X, k) + 1;
  u64 t_max = iroot(ctx.X + ctx.Y, k);

  std::vector<std::vector<Root>> shards(classes.size());
  parallel_for(classes.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      u64 z0 = classes[c];
      u64 t = t_min + (z0 + W - t_min % W) % W;
      for (; t <= t_max; t += W) {
        u64 tk = checked_pow(t, k);
        shards[c].push_back(Root{t, (tk - ctx.X) / W});
      }
    }
  });
  std::vector<Root> roots;
  for (auto& s : shards) roots.insert(roots.end(), s.begin(), s.end());
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.n < b.n; });
  return roots;
}

double table_constant(const WTrickContext& ctx, const SieveWeights& weights) {
  double ap = weights.alpha_plus ? *weights.alpha_plus : alpha_plus(ctx, weights).value;
  double X = static_cast<double>(ctx.X);
  double phiW = static_cast<double>(euler_phi(ctx.W));
  double sig = static_cast<double>(sigma(ctx.b, ctx.k, ctx.W));
  return phiW * std::pow(X, 1.0 - 1.0 / ctx.k) * std::log(X) / (ap * static_cast<double>(ctx.W) * sig);
}

namespace {

template <class Weigh>
WeightTable build_table(const WTrickContext& ctx, TableKind kind, unsigned workers, Weigh&& weigh) {
  WeightTable table{ctx.N, std::vector<double>(ctx.N, 0.0), kind};
  std::vector<Root> roots = table_roots(ctx, workers);
  parallel_for(roots.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) table.values[roots[i].n - 1] = weigh(roots[i].t);
  });
  return table;
}

}  // namespace

WeightTable build_f_b(const WTrickContext& ctx, const SieveWeights& weights, unsigned workers) {
  double c = table_constant(ctx, weights);
  return build_table(ctx, TableKind::prime_power_f, workers,
                     [&](u64 t) { return is_prime(t) ? c : 0.0; });
}

WeightTable build_f_b(const WTrickContext& ctx) {
  SieveWeights weights = selberg_weights(ctx.z, ctx.W, &ctx);
  return build_f_b(ctx, weights);
}

WeightTable build_v_b(const WTrickContext& ctx, const SieveWeights& weights, unsigned workers) {
  double c = table_constant(ctx, weights);
  return build_table(ctx, TableKind::majorant_v, workers,
                     [&](u64 t) { return c * rho_plus(t, weights); });
}

MeanConditionProbe mean_condition_probe(const WeightTable& table, double varrho, int s,
                                        double epsilon, u64 max_modulus) {
  if (table.N == 0) throw Error(Errc::precondition, "empty table");
  MeanConditionProbe probe;
  probe.threshold = 1.0 / s + epsilon;
  std::vector<u64> support = table.support();
  for (u64 q = 1; q <= max_modulus; ++q) {
    std::vector<long double> sums(q, 0.0L);
    for (u64 n : support) sums[n % q] += table.at(n);
    for (u64 r = 0; r < q; ++r) {
      // n in [1, N] with n = r (mod q)
      u64 first = r == 0 ? q : r;
      u64 size = first > table.N ? 0 : (table.N - first) / q + 1;
      if (size == 0 || static_cast<double>(size) < varrho * static_cast<double>(table.N)) continue;
      probe.progressions.push_back({q, r, size, static_cast<double>(sums[r] / size)});
    }
  }
  if (probe.progressions.empty()) {
    probe.min_mean = 0;
    probe.satisfied = false;
    return probe;
  }
  probe.min_mean = std::min_element(probe.progressions.begin(), probe.progressions.end(),
                                    [](const auto& a, const auto& b) { return a.mean < b.mean; })
                       ->mean;
  probe.satisfied = probe.min_mean >= probe.threshold;
  return probe;
}

void write_table_csv(const WeightTable& table, std::ostream& os) {
  char buf[64];
  os << "n,value\n";
  for (u64 n = 1; n <= table.N; ++n) {
    std::snprintf(buf, sizeof buf, "%.12g", table.values[n - 1]);
    os << n << ',' << buf << '\n';
  }
}

namespace {

constexpr char kRleMagic[8] = {'W', 'G', 'L', 'R', 'L', 'E', '0', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(Errc::precondition, "truncated RLE stream");
  }
  return v;
}

}  // namespace

void write_table_rle(const WeightTable& table, std::ostream& os) {
  std::vector<std::pair<u64, u64>> runs;  // (first index, length)
  for (u64 i = 0; i < table.N;) {
    if (table.values[i] == 0.0) {
      ++i;
      continue;
    }
    u64 j = i;
    while (j < table.N && table.values[j] != 0.0) ++j;
    runs.emplace_back(i, j - i);
    i = j;
  }
  os.write(kRleMagic, sizeof kRleMagic);
  put<u64>(os, table.N);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(table.kind));
  put<std::uint32_t>(os, 0);
  put<u64>(os, runs.size());
  for (auto [first, len] : runs) {
    put<u64>(os, first + 1);
    put<u64>(os, len);
    os.write(reinterpret_cast<const char*>(&table.values[first]), static_cast<std::streamsize>(len * sizeof(double)));
  }
}

WeightTable read_table_rle(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kRleMagic, sizeof magic) != 0) {
    throw Error(Errc::precondition, "not a weight-table RLE stream");
  }
  WeightTable table;
  table.N = get<u64>(is);
  auto kind = get<std::uint32_t>(is);
  if (kind > static_cast<std::uint32_t>(TableKind::signed_difference)) {
    throw Error(Errc::precondition, "unknown table kind in RLE stream");
  }
  table.kind = static_cast<TableKind>(kind);
  get<std::uint32_t>(is);
  u64 runs = get<u64>(is);
  table.values.assign(table.N, 0.0);
  for (u64 r = 0; r < runs; ++r) {
    u64 first = get<u64>(is);
    u64 len = get<u64>(is);
    if (first == 0 || first - 1 + len > table.N) throw Error(Errc::precondition, "RLE run out of range");
    if (!is.read(reinterpret_cast<char*>(&table.values[first - 1]), static_cast<std::streamsize>(len * sizeof(double)))) {
      throw Error(Errc::precondition, "truncated RLE run");
    }
  }
  return table;
}

}  // namespace wgl
