#include "wgl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <new>
#include <sstream>

#include "wgl/error.hpp"
#include "wgl/fourier.hpp"
#include "wgl/local_arith.hpp"
#include "wgl/prime_tools.hpp"
#include "wgl/representation.hpp"
#include "wgl/selberg_sieve.hpp"

namespace wgl::cli {

namespace {

using json = nlohmann::json;

struct Globals {
  u64 seed = 1;
  unsigned workers = 0;
  u64 memory_budget = u64{4} << 30;
  std::string output;
  std::string format = "json";
  bool no_timing = false;
  std::string config;
};

struct ContextOpts {
  int k = 2;
  int s = 4;
  double theta = 0.75;
  double delta = 0;
  double varrho = 0.05;
  double w = 3;
  u64 W = 0;
  u64 M = 0;
  u64 N = 0;
  u64 b = 1;
};

json count_json(Count c) {
  if (c <= std::numeric_limits<u64>::max()) return static_cast<u64>(c);
  return to_decimal(c);
}

// Reals are reported with 12 significant digits.
void round_reals(json& j) {
  if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    j = std::strtod(buf, nullptr);
  } else if (j.is_structured()) {
    for (auto& v : j) round_reals(v);
  }
}

void add_context_opts(CLI::App* sub, ContextOpts& o) {
  sub->add_option("--k", o.k, "exponent k");
  sub->add_option("--s", o.s, "number of summands");
  sub->add_option("--theta", o.theta, "short-interval exponent");
  sub->add_option("--delta", o.delta, "sieve exponent (0: 0.9 theta/k)");
  sub->add_option("--varrho", o.varrho, "progression density for the mean probe");
  sub->add_option("--w", o.w, "W = 2k^2 prod_{p<=w} p");
  sub->add_option("--W", o.W, "explicit W (0: from --w)");
  sub->add_option("--M", o.M, "subinterval top M_i");
  sub->add_option("--N", o.N, "target window length (overrides --M)");
  sub->add_option("--b", o.b, "residue class b mod W");
}

WTrickContext make_context(const ContextOpts& o) {
  ContextRequest req;
  req.k = o.k;
  req.s = o.s;
  req.theta = o.theta;
  req.delta = o.delta;
  req.varrho = o.varrho;
  req.w = o.w;
  req.M_i = o.M;
  if (o.W) req.W_override = o.W;
  req.b = o.b;
  if (o.N) return context_for_length(req, o.N);
  if (!o.M) throw Error(Errc::precondition, "either --M or --N is required");
  return build_context(req);
}

json context_json(const WTrickContext& c) {
  return {{"k", c.k}, {"s", c.s}, {"theta", c.theta}, {"delta", c.delta}, {"varrho", c.varrho},
          {"w", c.w}, {"W", c.W}, {"W_overridden", c.W_overridden}, {"b", c.b}, {"M_i", c.M_i},
          {"x", c.x}, {"m", c.m}, {"N", c.N}, {"X", c.X}, {"Y", c.Y}, {"z", c.z}, {"D", c.D},
          {"xy_ratio", c.xy_ratio},
          {"note", "W omits the [1/varrho]!^2 factor"}};
}

WeightTable table_of_kind(const std::string& kind, const WTrickContext& ctx, const SieveWeights& weights,
                          unsigned workers) {
  if (kind == "f") return build_f_b(ctx, weights, workers);
  if (kind == "v") return build_v_b(ctx, weights, workers);
  if (kind == "indicator") return indicator_table(ctx.N);
  throw Error(Errc::precondition, "unknown table kind '" + kind + "' (f, v, indicator)");
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
  } else if (j.is_array() && std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); })) {
    std::string joined;
    for (const auto& v : j) {
      if (!joined.empty()) joined += ';';
      joined += v.is_string() ? v.get<std::string>() : v.dump();
    }
    rows.emplace_back(prefix, joined);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

std::string render(const json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  json body = report;
  json tuples = json::array();
  if (body.contains("result") && body["result"].is_object() && body["result"].contains("witnesses")) {
    tuples = body["result"]["witnesses"];
    body["result"].erase("witnesses");
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(body, "", rows);
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  if (!tuples.empty()) {
    // witness tuples as a second table: n,p_1,...,p_s
    out += "\nn";
    for (std::size_t i = 1; i <= tuples[0].size(); ++i) out += ",p_" + std::to_string(i);
    out += "\n";
    for (const auto& t : tuples) {
      out += report["result"]["n"].dump();
      for (const auto& p : t) out += "," + p.dump();
      out += "\n";
    }
  }
  return out;
}

// ---- verify: replay cheap invariants of a previously written report ----

json verify_report(const json& report) {
  json checks = json::array();
  auto check = [&](const std::string& name, bool ok) { checks.push_back({{"check", name}, {"ok", ok}}); };
  const std::string cmd = report.at("command").get<std::string>();
  const json& p = report.at("parameters");
  const json& r = report.at("result");
  auto param_int = [&](const char* key) { return std::stoll(p.at(key).get<std::string>()); };
  auto param_real = [&](const char* key) { return std::stod(p.at(key).get<std::string>()); };

  if (cmd == "constants") {
    auto lc = waring_goldbach_modulus(static_cast<int>(param_int("k")));
    check("R_k", r.at("R_k").get<u64>() == lc.R_k);
    u64 prod = 1;
    for (const auto& e : r.at("entries")) prod *= static_cast<u64>(std::llround(std::pow(e.at("p").get<double>(), e.at("gamma").get<int>())));
    check("R_k equals product of p^gamma", prod == lc.R_k);
  } else if (cmd == "local-count") {
    auto c = count_unit_solutions(param_int("h"), param_int("m"), static_cast<int>(param_int("k")), static_cast<int>(param_int("s")));
    check("count", r.at("count") == count_json(c.count));
  } else if (cmd == "count") {
    RepresentationQuery q{static_cast<u64>(param_int("n")), static_cast<int>(param_int("k")), static_cast<int>(param_int("s")),
                          static_cast<u64>(param_int("lo")), static_cast<u64>(param_int("hi")), CountMode::exact};
    check("count", r.at("count").get<u64>() == count_exact(q));
    for (const auto& t : r.value("witnesses", json::array())) {
      u64 sum = 0;
      bool inside = true;
      for (const auto& pj : t) {
        u64 pr = pj.get<u64>();
        sum += checked_pow(pr, static_cast<unsigned>(q.k));
        inside = inside && pr > q.lo && pr <= q.hi && is_prime(pr);
      }
      check("witness sums to n", sum == q.n && inside);
    }
  } else if (cmd == "sieve-weights") {
    double J = compute_J(r.at("z").get<double>(), r.at("W").get<u64>());
    check("J", std::abs(J - r.at("J").get<double>()) <= 1e-9 * J);
    check("rho_1 = 1", std::abs(r.at("rho_1").get<double>() - 1.0) < 1e-12);
    check("|rho_d| <= 1", r.at("max_abs_rho").get<double>() <= 1.0 + 1e-12);
  } else if (cmd == "scan") {
    int k = static_cast<int>(param_int("k")), s = static_cast<int>(param_int("s"));
    double theta = param_real("theta");
    u64 R = waring_goldbach_modulus(k).R_k;
    const auto& exc = r.at("exceptional");
    bool congruent = true;
    for (const auto& n : exc) congruent = congruent && n.get<u64>() % R == static_cast<u64>(s) % R;
    check("exceptional n = s (mod R_k)", congruent);
    u64 tested = r.at("tested").get<u64>();
    u64 wb = r.at("window_begin").get<u64>(), we = r.at("window_end").get<u64>();
    check("window counts admissible n", tested == 0 || (wb % R == static_cast<u64>(s) % R && we >= wb &&
                                                         (we - wb) % R == 0 && (we - wb) / R + 1 == tested));
    if (tested > 0) {
      double d = static_cast<double>(exc.size()) / static_cast<double>(tested);
      check("density", std::abs(d - r.at("density").get<double>()) <= 1e-11 * std::max(1.0, d));
    } else {
      check("density null when nothing tested", r.at("density").is_null());
    }
    std::size_t replay = std::min<std::size_t>(exc.size(), 20);
    for (std::size_t i = 0; i < replay; ++i) {
      u64 n = exc[i].get<u64>();
      auto [lo, hi] = prime_window(n, k, s, theta);
      check("exception " + std::to_string(n) + " has no representation",
            ExactCounter(k, s, lo, hi).count(n) == 0);
    }
  } else {
    check("report has a result", r.is_object());
  }
  bool ok = std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("ok").get<bool>(); });
  return {{"verified_command", cmd}, {"checks", checks}, {"verified", ok}};
}

// Splices config-file values in right after the subcommand token, so later
// command-line flags override them (options keep the last value).
int inject_config(CLI::App& app, std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return 0;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config file " << path << "\n";
    return 1;
  }
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    return 1;
  }
  if (!cfg.is_object()) {
    std::cerr << "error: config must be a JSON object\n";
    return 1;
  }
  std::size_t pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    for (CLI::App* candidate : app.get_subcommands([](CLI::App*) { return true; })) {
      if (args[i] == candidate->get_name()) {
        sub = candidate;
        pos = i + 1;
        break;
      }
    }
    if (sub) break;
  }
  std::vector<std::string> injected;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::string key = it.key();
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (key == "--config") continue;
    const CLI::Option* opt = sub ? sub->get_option_no_throw(key) : nullptr;
    if (!opt) opt = app.get_option_no_throw(key);
    if (!opt) {
      std::cerr << "error: unknown config key '" << it.key() << "'\n";
      return 1;
    }
    const json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) injected.push_back(key);
    } else {
      injected.push_back(key);
      injected.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), injected.begin(), injected.end());
  return 0;
}

json echo_parameters(const CLI::App& app, const CLI::App* sub) {
  json params = json::object();
  auto take = [&](const CLI::App* a) {
    for (const CLI::Option* opt : a->get_options()) {
      if (opt->get_lnames().empty()) continue;
      std::string name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      std::string value;
      if (opt->count() > 0) {
        value = opt->results().back();  // later flags override config values
      } else {
        value = opt->get_default_str();
        if (value.empty() && opt->get_expected_min() == 0) value = "false";
      }
      params[name] = value;
    }
  };
  take(&app);
  if (sub) take(sub);
  return params;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Waring-Goldbach short-interval laboratory"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  if (const char* env = std::getenv("WGL_WORKERS")) {
    try {
      g.workers = static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      g.workers = 0;
    }
  }
  app.add_option("--seed", g.seed, "seed for sampled windows");
  app.add_option("--workers", g.workers, "worker threads (default WGL_WORKERS or 1)");
  app.add_option("--memory-budget", g.memory_budget, "bytes available to one transform");
  app.add_option("--output", g.output, "write the report here instead of stdout");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--no-timing", g.no_timing, "omit timing fields");
  app.add_option("--config", g.config, "JSON file with default parameter values");

  std::map<std::string, std::function<json()>> handlers;

  // constants
  int c_k = 2;
  auto* constants = app.add_subcommand("constants", "tau, gamma and R_k for an exponent");
  constants->add_option("--k", c_k, "exponent k");
  handlers["constants"] = [&] {
    auto lc = waring_goldbach_modulus(c_k);
    json entries = json::array();
    for (const auto& e : lc.entries) entries.push_back({{"p", e.p}, {"tau", e.tau}, {"gamma", e.gamma}});
    return json{{"k", lc.k}, {"R_k", lc.R_k}, {"entries", entries}};
  };

  // local-count
  u64 lc_h = 1, lc_m = 0;
  int lc_k = 2, lc_s = 4;
  auto* local = app.add_subcommand("local-count", "ordered unit solutions of y_1^k+...+y_s^k = m (mod h)");
  local->add_option("--h", lc_h, "modulus")->required();
  local->add_option("--m", lc_m, "residue")->required();
  local->add_option("--k", lc_k, "exponent k");
  local->add_option("--s", lc_s, "number of summands");
  handlers["local-count"] = [&] {
    auto c = count_unit_solutions(lc_h, lc_m % std::max<u64>(lc_h, 1), lc_k, lc_s);
    return json{{"h", c.h}, {"m", c.m}, {"k", c.k}, {"s", c.s}, {"count", count_json(c.count)}};
  };

  // primes
  u64 p_lo = 2, p_hi = 100, p_d = 1, p_c = 0, p_list = 1000;
  auto* primes = app.add_subcommand("primes", "primes in [lo, hi), optionally in a residue class");
  primes->add_option("--lo", p_lo, "inclusive lower end")->required();
  primes->add_option("--hi", p_hi, "exclusive upper end")->required();
  primes->add_option("--d", p_d, "modulus of the residue class");
  primes->add_option("--c", p_c, "residue");
  primes->add_option("--list-limit", p_list, "list the primes when there are at most this many");
  handlers["primes"] = [&] {
    SieveOptions opts{std::max(1u, g.workers), g.memory_budget};
    PrimeInterval iv = primes_in_interval(p_lo, p_hi, opts);
    json r{{"lo", iv.lo}, {"hi", iv.hi}, {"count", iv.primes.size()}};
    if (p_d > 1) {
      if (std::gcd(p_c % p_d, p_d) != 1) throw Error(Errc::coprimality, "gcd(c, d) must be 1");
      r["d"] = p_d;
      r["c"] = p_c;
      r["count_in_class"] = count_primes_in_ap(iv, p_d, p_c);
    }
    if (iv.primes.size() <= p_list) r["primes"] = iv.primes;
    return r;
  };

  // density-check
  double dc_x = 1e8, dc_theta = 0.7, dc_eps = 0.01, dc_alpha = 0.99;
  u64 dc_d = 1, dc_c = 1;
  auto* density = app.add_subcommand("density-check", "primes = c (mod d) in [x, x + x^(theta - epsilon))");
  density->add_option("--x", dc_x, "interval start");
  density->add_option("--theta", dc_theta, "exponent theta");
  density->add_option("--epsilon", dc_eps, "exponent slack");
  density->add_option("--d", dc_d, "modulus");
  density->add_option("--c", dc_c, "residue");
  density->add_option("--alpha-minus", dc_alpha, "claimed lower density constant");
  handlers["density-check"] = [&] {
    SieveOptions opts{std::max(1u, g.workers), g.memory_budget};
    DensityCheck d = check_density_lower_bound(dc_x, dc_theta, dc_eps, dc_d, dc_c, dc_alpha, opts);
    return json{{"x", d.x}, {"theta", d.theta}, {"epsilon", d.epsilon}, {"d", d.d}, {"c", d.c},
                {"alpha_minus", d.alpha_minus}, {"interval_lo", d.interval.lo}, {"interval_hi", d.interval.hi},
                {"prime_count", d.prime_count}, {"expected_lower", d.expected_lower},
                {"observed_ratio", d.observed_ratio}, {"pass", d.pass}};
  };

  // sieve-weights
  ContextOpts sw_ctx;
  double sw_z = 0;
  u64 sw_list = 200;
  auto* sieve = app.add_subcommand("sieve-weights", "Selberg weights rho_d, J and alpha^+");
  add_context_opts(sieve, sw_ctx);
  sieve->add_option("--z", sw_z, "sieve level (default: from the context)");
  sieve->add_option("--list-limit", sw_list, "list the weights when the support is at most this large");
  handlers["sieve-weights"] = [&] {
    std::optional<WTrickContext> ctx;
    double z = sw_z;
    u64 W = sw_ctx.W ? sw_ctx.W : w_trick_modulus(sw_ctx.k, sw_ctx.w);
    if (sw_ctx.M || sw_ctx.N) {
      ctx = make_context(sw_ctx);
      if (z <= 0) z = ctx->z;
      W = ctx->W;
    }
    if (z <= 0) throw Error(Errc::precondition, "give --z or a context (--M / --N)");
    SieveWeights sw = selberg_weights(z, W, ctx ? &*ctx : nullptr);
    double maxabs = 0;
    for (double r : sw.rho) maxabs = std::max(maxabs, std::abs(r));
    double diag = diagonal_form(sw);
    json r{{"z", sw.z}, {"W", sw.W}, {"J", sw.J}, {"support_size", sw.support.size()},
           {"sieve_prime_count", sw.sieve_primes.size()}, {"rho_1", sw.rho_of(1)}, {"max_abs_rho", maxabs},
           {"diagonal_form", diag}, {"inverse_J", 1.0 / sw.J},
           {"relative_error", std::abs(diag * sw.J - 1.0)}};
    if (ctx) {
      AlphaPlus ap = alpha_plus(*ctx, sw);
      r["context"] = context_json(*ctx);
      r["alpha_plus"] = {{"value", ap.value}, {"reference", ap.reference}, {"ratio", ap.ratio}};
    }
    if (sw.support.size() <= sw_list) {
      json list = json::array();
      for (std::size_t i = 0; i < sw.support.size(); ++i) list.push_back({{"d", sw.support[i]}, {"rho", sw.rho[i]}});
      r["weights"] = list;
    }
    return r;
  };

  // tables
  ContextOpts t_ctx;
  std::string t_kind = "f", t_out;
  bool t_rle = false;
  double t_eps = 0;
  auto* tables = app.add_subcommand("tables", "weight tables f_b, v_b on [N]");
  add_context_opts(tables, t_ctx);
  tables->add_option("--kind", t_kind, "f, v or indicator");
  tables->add_option("--table-out", t_out, "write the table (CSV n,value; RLE with --rle)");
  tables->add_flag("--rle", t_rle, "binary run-length export");
  tables->add_option("--epsilon", t_eps, "slack in the mean threshold 1/s + epsilon");
  handlers["tables"] = [&] {
    unsigned workers = std::max(1u, g.workers);
    WTrickContext ctx = make_context(t_ctx);
    SieveWeights sw = selberg_weights(ctx.z, ctx.W, &ctx);
    WeightTable f = build_f_b(ctx, sw, workers);
    WeightTable v = build_v_b(ctx, sw, workers);
    u64 violations = 0;
    for (u64 i = 0; i < ctx.N; ++i) violations += v.values[i] < f.values[i];
    WeightTable table = t_kind == "f" ? f : t_kind == "v" ? v : table_of_kind(t_kind, ctx, sw, workers);
    MeanConditionProbe probe = mean_condition_probe(table, ctx.varrho, ctx.s, t_eps);
    if (!t_out.empty()) {
      std::ofstream os(t_out, t_rle ? std::ios::binary : std::ios::out);
      if (!os) throw Error(Errc::precondition, "cannot write " + t_out);
      if (t_rle) write_table_rle(table, os); else write_table_csv(table, os);
    }
    return json{{"context", context_json(ctx)},
                {"kind", to_string(table.kind)},
                {"alpha_plus", *sw.alpha_plus},
                {"constant", table_constant(ctx, sw)},
                {"sigma_W_b", sigma(ctx.b, ctx.k, ctx.W)},
                {"N", table.N},
                {"sum", table.sum()},
                {"sum_over_N", table.sum() / static_cast<double>(table.N)},
                {"support_size", table.support().size()},
                {"majorization_violations", violations},
                {"mean_probe", {{"progressions", probe.progressions.size()}, {"min_mean", probe.min_mean},
                                {"threshold", probe.threshold}, {"satisfied", probe.satisfied}}}};
  };

  // spectrum
  ContextOpts sp_ctx;
  std::string sp_kind = "f", sp_out;
  u64 sp_G = 0;
  auto* spec = app.add_subcommand("spectrum", "grid values of a weight table's Fourier transform");
  add_context_opts(spec, sp_ctx);
  spec->add_option("--kind", sp_kind, "f, v or indicator");
  spec->add_option("--G", sp_G, "grid size (default: power of two >= 16N)");
  spec->add_option("--table-out", sp_out, "write the spectrum as CSV j,real,imag");
  handlers["spectrum"] = [&] {
    WTrickContext ctx = make_context(sp_ctx);
    SieveWeights sw = selberg_weights(ctx.z, ctx.W, &ctx);
    WeightTable table = table_of_kind(sp_kind, ctx, sw, std::max(1u, g.workers));
    u64 G = sp_G ? sp_G : default_grid(ctx.N);
    Spectrum s = spectrum(table, G);
    long double energy = 0, l2 = 0;
    for (u64 j = 0; j <= G / 2; ++j) {
      long double m = std::norm(s.half[j]);
      energy += (j == 0 || (G % 2 == 0 && j == G / 2)) ? m : 2 * m;
    }
    for (double v : table.values) l2 += static_cast<long double>(v) * v;
    if (!sp_out.empty()) {
      std::ofstream os(sp_out);
      if (!os) throw Error(Errc::precondition, "cannot write " + sp_out);
      write_spectrum_csv(s, os);
    }
    double parseval = l2 > 0 ? static_cast<double>(std::abs(energy / G - l2) / l2) : 0.0;
    return json{{"context", context_json(ctx)}, {"kind", to_string(table.kind)}, {"G", G}, {"N", table.N},
                {"value_at_zero", s.half[0].real()}, {"sum", table.sum()},
                {"parseval_relative_error", parseval}};
  };

  // pseudorandomness
  ContextOpts pr_ctx;
  u64 pr_G = 0;
  double pr_A = 10, pr_arc = 0;
  auto* pseudo = app.add_subcommand("pseudorandomness", "sup |v_b^ - 1_[N]^| / N, overall and on minor arcs");
  add_context_opts(pseudo, pr_ctx);
  pseudo->add_option("--G", pr_G, "grid size");
  pseudo->add_option("--A", pr_A, "arc exponent A");
  pseudo->add_option("--arc-exp", pr_arc, "Q = (log X)^arc-exp (0: use A)");
  handlers["pseudorandomness"] = [&] {
    WTrickContext ctx = make_context(pr_ctx);
    SieveWeights sw = selberg_weights(ctx.z, ctx.W, &ctx);
    ArcDissection arcs = make_dissection(ctx.X, ctx.Y, pr_arc > 0 ? pr_arc : pr_A, pr_A);
    PseudorandomnessReport rep = pseudorandomness_report(ctx, sw, arcs, pr_G, std::max(1u, g.workers));
    json r{{"context", context_json(ctx)}, {"N", rep.N}, {"G", rep.G}, {"grid_sup", rep.grid_sup},
           {"sup_all", rep.sup_all}, {"argmax_alpha", rep.argmax_alpha}, {"minor_found", rep.minor_found},
           {"Q", arcs.Q}, {"T", arcs.T}};
    r["sup_minor"] = rep.minor_found ? json(rep.sup_minor) : json(nullptr);
    r["argmax_minor_alpha"] = rep.minor_found ? json(rep.argmax_minor_alpha) : json(nullptr);
    return r;
  };

  // restriction
  ContextOpts rs_ctx;
  std::string rs_kind = "f";
  double rs_q = 0;
  u64 rs_G = 0;
  auto* restr = app.add_subcommand("restriction", "L^q norm of a table's spectrum against N^{1-1/q}");
  add_context_opts(restr, rs_ctx);
  restr->add_option("--kind", rs_kind, "f, v or indicator");
  restr->add_option("--q-exp", rs_q, "exponent q (default 2s - 1/2)");
  restr->add_option("--G", rs_G, "grid size");
  handlers["restriction"] = [&] {
    WTrickContext ctx = make_context(rs_ctx);
    SieveWeights sw = selberg_weights(ctx.z, ctx.W, &ctx);
    WeightTable table = table_of_kind(rs_kind, ctx, sw, std::max(1u, g.workers));
    double q = rs_q > 0 ? rs_q : 2.0 * ctx.s - 0.5;
    RestrictionNorm rn = restriction_norm(table, q, rs_G);
    return json{{"context", context_json(ctx)}, {"kind", to_string(table.kind)}, {"q", rn.q}, {"G", rn.G},
                {"N", rn.N}, {"norm", rn.norm}, {"ratio", rn.ratio}};
  };

  // count
  u64 ct_n = 0, ct_lo = 0, ct_hi = 0, ct_wit = 0;
  int ct_k = 2, ct_s = 4;
  std::string ct_mode = "exact";
  auto* count = app.add_subcommand("count", "ordered representations n = p_1^k + ... + p_s^k, lo < p_i <= hi");
  count->add_option("--n", ct_n, "target")->required();
  count->add_option("--k", ct_k, "exponent k");
  count->add_option("--s", ct_s, "number of summands");
  count->add_option("--lo", ct_lo, "primes exceed lo")->required();
  count->add_option("--hi", ct_hi, "primes are at most hi")->required();
  count->add_option("--mode", ct_mode, "exact or convolution")->check(CLI::IsMember({"exact", "convolution"}));
  count->add_option("--witnesses", ct_wit, "list up to this many sorted tuples (exact mode)");
  handlers["count"] = [&] {
    json r{{"n", ct_n}, {"k", ct_k}, {"s", ct_s}, {"lo", ct_lo}, {"hi", ct_hi}, {"mode", ct_mode}};
    if (ct_mode == "exact") {
      ExactCounter ec(ct_k, ct_s, ct_lo, ct_hi, g.memory_budget);
      r["count"] = ec.count(ct_n);
      r["prime_count"] = ec.prime_count();
      if (ct_wit) r["witnesses"] = ec.witnesses(ct_n, ct_wit);
    } else {
      if (ct_wit) throw Error(Errc::precondition, "witnesses are only available in exact mode");
      ConvolutionCounts cc = count_convolution(ct_k, ct_s, ct_lo, ct_hi, ct_n, ct_n, g.memory_budget);
      r["count"] = cc.at(ct_n);
      r["exact_fallback"] = cc.exact_fallback;
    }
    return r;
  };

  // scan
  u64 sc_M = 0, sc_W = 0, sc_begin = 0, sc_count = 10000;
  int sc_k = 2, sc_s = 4;
  double sc_theta = 0.75, sc_w = 3;
  auto* scan = app.add_subcommand("scan", "exceptional n in a window of admissible n <= M");
  scan->add_option("--M", sc_M, "height M")->required();
  scan->add_option("--k", sc_k, "exponent k");
  scan->add_option("--s", sc_s, "number of summands");
  scan->add_option("--theta", sc_theta, "short-interval exponent");
  scan->add_option("--w", sc_w, "W = 2k^2 prod_{p<=w} p");
  scan->add_option("--W", sc_W, "explicit W (0: from --w)");
  scan->add_option("--window-begin", sc_begin, "first n of the window (0: seeded in (M/2, M])");
  scan->add_option("--window-count", sc_count, "number of admissible n to test");
  handlers["scan"] = [&] {
    ScanRequest req;
    req.M = sc_M;
    req.k = sc_k;
    req.s = sc_s;
    req.theta = sc_theta;
    req.w = sc_w;
    if (sc_W) req.W_override = sc_W;
    if (sc_begin) req.window_begin = sc_begin;
    req.window_count = sc_count;
    req.seed = g.seed;
    req.workers = std::max(1u, g.workers);
    req.memory_budget = g.memory_budget;
    ScanReport rep = scan_exceptional(req);
    json subs = json::array();
    for (const auto& si : rep.subintervals) subs.push_back({{"M_i", si.M_i}, {"x", si.x}, {"N", si.N}, {"m", si.m}});
    json r{{"M", rep.M}, {"k", rep.k}, {"s", rep.s}, {"theta", rep.theta}, {"W", rep.W}, {"R_k", rep.R_k},
           {"subintervals", subs}, {"subdivision_length", rep.subdivision_length},
           {"subdivision_bound", rep.subdivision_bound}, {"window_begin", rep.window_begin},
           {"window_end", rep.window_end}, {"tested", rep.tested}, {"exceptional", rep.exceptional},
           {"unconfirmed", rep.unconfirmed}, {"coverage", rep.coverage},
           {"n0_in_range", rep.n0_in_range}, {"n0_out_of_range", rep.n0_out_of_range},
           {"flagged_classes", rep.flagged_classes}, {"convolution_runs", rep.convolution_runs},
           {"exact_fallback_runs", rep.exact_fallback_runs}, {"warnings", rep.warnings}};
    r["density"] = rep.density ? json(*rep.density) : json(nullptr);
    if (!g.no_timing) r["wall_time"] = rep.wall_time;
    return r;
  };

  // verify
  std::string v_in;
  auto* verify = app.add_subcommand("verify", "replay cheap invariants of a JSON report");
  verify->add_option("--input", v_in, "report file")->required();
  handlers["verify"] = [&] {
    std::ifstream in(v_in);
    if (!in) throw Error(Errc::precondition, "cannot read " + v_in);
    json report;
    try {
      in >> report;
    } catch (const json::exception& e) {
      throw Error(Errc::precondition, std::string("report is not valid JSON: ") + e.what());
    }
    json r;
    try {
      r = verify_report(report);
    } catch (const json::exception& e) {
      throw Error(Errc::precondition, std::string("malformed report: ") + e.what());
    }
    return r;
  };

  std::vector<std::string> args(argv + 1, argv + argc);
  if (int rc = inject_config(app, args); rc != 0) return rc;
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    auto start = std::chrono::steady_clock::now();
    json report{{"command", name}, {"parameters", echo_parameters(app, chosen)}, {"result", handlers.at(name)()}};
    if (!g.no_timing) {
      report["timing"] = {{"wall_time", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    }
    round_reals(report);
    std::string text = render(report, g.format);
    if (g.output.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(g.output);
      if (!os) throw Error(Errc::precondition, "cannot write " + g.output);
      os << text;
    }
    if (name == "verify" && !report["result"]["verified"].get<bool>()) {
      std::cerr << "verification failed\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::resource ? 3 : 2;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: RESOURCE: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace wgl::cli
