// occtime: command-line front end for the occupation-time library.
//
//   occtime moments  --diffusion bm --n-max 3
//   occtime mgf      --diffusion bessel --nu -0.3 --beta 0.6 --lambda 1 --r 2
//   occtime density  --diffusion bessel --nu -0.3 --beta 0.6 --points 20
//   occtime simulate --diffusion skew-bm --beta 0.7 --paths 100000 --step 1e-5
//   occtime invert   --gamma 1 --n 1 --t 1,10,100
//   occtime verify   --scale quick --output report.json
//
// Exit codes: 0 success, 1 verification or numerical failure, 2 usage or
// parameter error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "occtime/densities.hpp"
#include "occtime/diffusion.hpp"
#include "occtime/format.hpp"
#include "occtime/ks.hpp"
#include "occtime/laplace.hpp"
#include "occtime/mgf.hpp"
#include "occtime/moments.hpp"
#include "occtime/montecarlo.hpp"
#include "occtime/simd.hpp"
#include "occtime/special_fn.hpp"
#include "occtime/verify.hpp"

#ifndef OCCTIME_VERSION
#define OCCTIME_VERSION "dev"
#endif

using namespace occtime;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// --- options shared by the subcommands ---------------------------------------

struct Common {
  std::string format = "csv";
  std::string output;
  unsigned workers = 0;
  std::string simd = "auto";
};

// Numeric diffusion parameters are kept as text so that --exact can read
// them as rationals.
struct DiffusionArgs {
  std::string diffusion = "bm";
  std::string beta, nu, sigma_plus, sigma_minus, gamma, p, rays;
};

void add_common(CLI::App* app, Common& c, bool has_format = true) {
  if (has_format)
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--output,-o", c.output, "Output file (default: stdout)");
  app->add_option("--workers", c.workers, "Worker threads (0 = logical cores)");
  app->add_option("--simd", c.simd, "Kernel selection")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

void add_diffusion(CLI::App* app, DiffusionArgs& d, const std::vector<std::string>& allowed) {
  app->add_option("--diffusion", d.diffusion, "Diffusion family")->check(CLI::IsMember(allowed));
  app->add_option("--beta", d.beta, "Skewness in [0, 1] (skew-bm, bessel)");
  app->add_option("--nu", d.nu, "Bessel index in (-1, 0)");
  app->add_option("--sigma-plus", d.sigma_plus, "Volatility on [0, inf) (oscillating)");
  app->add_option("--sigma-minus", d.sigma_minus, "Volatility on (-inf, 0) (oscillating)");
  app->add_option("--gamma", d.gamma, "Stickiness >= 0 (sticky)");
  app->add_option("--p", d.p, "Comma-separated ray probabilities (spider)");
  app->add_option("--rays", d.rays, "Comma-separated 1-based rays counted by A (spider)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

double to_number(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  // Accept rationals such as 1/3 wherever a number is expected.
  try {
    return to_double(parse_rational(text));
  } catch (const std::exception&) {
    throw ParameterError("--" + flag + ": not a number: '" + text + "'");
  }
}

const std::string& need(const std::string& value, const std::string& flag, const std::string& diffusion) {
  if (value.empty()) throw ParameterError("--" + flag + " is required for diffusion '" + diffusion + "'");
  return value;
}

ParamMap param_map(const DiffusionArgs& d) {
  const std::string& n = d.diffusion;
  if (n == "bm" || n == "spider") return {};
  if (n == "skew-bm") return {{"beta", to_number(need(d.beta, "beta", n), "beta")}};
  if (n == "bessel")
    return {{"nu", to_number(need(d.nu, "nu", n), "nu")}, {"beta", to_number(need(d.beta, "beta", n), "beta")}};
  if (n == "oscillating")
    return {{"sigma_plus", to_number(need(d.sigma_plus, "sigma-plus", n), "sigma-plus")},
            {"sigma_minus", to_number(need(d.sigma_minus, "sigma-minus", n), "sigma-minus")}};
  if (n == "sticky") return {{"gamma", to_number(need(d.gamma, "gamma", n), "gamma")}};
  throw ParameterError("unknown diffusion '" + n + "'");
}

std::vector<double> spider_probabilities(const DiffusionArgs& d) {
  std::vector<double> p;
  for (const auto& s : split_list(need(d.p, "p", "spider"))) p.push_back(to_number(s, "p"));
  return p;
}

std::set<unsigned> spider_rays(const DiffusionArgs& d) {
  std::set<unsigned> r;
  for (const auto& s : split_list(need(d.rays, "rays", "spider"))) {
    const double v = to_number(s, "rays");
    if (v < 1 || v != static_cast<unsigned>(v)) throw ParameterError("--rays: ray indices are positive integers");
    r.insert(static_cast<unsigned>(v));
  }
  return r;
}

void apply_simd(const Common& c) {
  if (c.simd == "scalar") set_simd_override(SimdLevel::scalar);
  else if (c.simd == "auto") set_simd_override(std::nullopt);
  else if (!avx2_available()) throw ParameterError("--simd avx2: not available on this machine or build");
  else set_simd_override(SimdLevel::avx2);
}

json params_json(const ParamMap& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

json meta_json(const std::string& command, const DiffusionArgs* d, const ParamMap& params) {
  json j;
  j["tool"] = "occtime";
  j["version"] = OCCTIME_VERSION;
  j["command"] = command;
  if (d) {
    j["diffusion"] = d->diffusion;
    j["params"] = params_json(params);
    if (d->diffusion == "spider") {
      j["p"] = d->p;
      j["rays"] = d->rays;
    }
  }
  return j;
}

// Writes the payload to --output or stdout. A CSV written to a file gets a
// "<file>.meta.json" sidecar with the run metadata, since CSV has no place
// for it.
void emit(const Common& c, const std::string& payload, const json& meta) {
  if (c.output.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw std::runtime_error("cannot open output file '" + c.output + "'");
  f << payload;
  if (!payload.empty() && payload.back() != '\n') f << '\n';
  if (c.format == "csv") {
    std::ofstream m(c.output + ".meta.json");
    m << meta.dump(2) << '\n';
  }
}

// --- moments -----------------------------------------------------------------

struct MomentsArgs {
  Common common;
  DiffusionArgs d;
  unsigned n_max = 10;
  std::string lambda;
  bool exact = false;
  std::string method = "closed";
};

MomentTable compute_moments(const MomentsArgs& a) {
  const std::string& n = a.d.diffusion;
  const unsigned N = a.n_max;
  if (a.method == "quadrature") {
    if (n == "spider") throw ParameterError("--method quadrature needs a diffusion with a Green kernel");
    const double lambda = a.lambda.empty() ? 1.0 : to_number(a.lambda, "lambda");
    const auto spec = make_diffusion(n, param_map(a.d));
    if (N - 1 > spec->max_hitting_derivative())
      throw ParameterError("--n-max exceeds the supported order " + std::to_string(spec->max_hitting_derivative() + 1));
    return generic_laplace_moments(*spec, lambda, N).table;
  }
  if (n == "sticky") {
    if (a.lambda.empty()) throw ParameterError("--lambda is required for sticky (not self-similar)");
    if (a.exact) throw ParameterError("--exact is not available for sticky");
    return sticky_moments(to_number(need(a.d.gamma, "gamma", n), "gamma"), to_number(a.lambda, "lambda"), N);
  }
  if (!a.lambda.empty())
    throw ParameterError("--lambda applies to sticky or --method quadrature only; '" + n + "' is self-similar");
  if (a.method == "recursion" && n != "bessel") throw ParameterError("--method recursion applies to bessel only");
  auto rat = [](const std::string& text, const std::string& flag) {
    try {
      return parse_rational(text);
    } catch (const std::exception&) {
      throw ParameterError("--" + flag + ": not a number: '" + text + "'");
    }
  };
  if (n == "bm") return bm_moments(N);
  if (n == "skew-bm") {
    const std::string& b = need(a.d.beta, "beta", n);
    return a.exact ? skew_bm_moments(rat(b, "beta"), N) : skew_bm_moments(to_number(b, "beta"), N);
  }
  if (n == "oscillating") {
    const std::string& sp = need(a.d.sigma_plus, "sigma-plus", n);
    const std::string& sm = need(a.d.sigma_minus, "sigma-minus", n);
    return a.exact ? oscillating_moments(rat(sp, "sigma-plus"), rat(sm, "sigma-minus"), N)
                   : oscillating_moments(to_number(sp, "sigma-plus"), to_number(sm, "sigma-minus"), N);
  }
  if (n == "spider") {
    if (a.exact) {
      std::vector<BigRational> p;
      for (const auto& s : split_list(need(a.d.p, "p", n))) p.push_back(rat(s, "p"));
      return spider_moments(p, spider_rays(a.d), N);
    }
    return spider_moments(spider_probabilities(a.d), spider_rays(a.d), N);
  }
  // bessel
  const std::string& nu = need(a.d.nu, "nu", n);
  const std::string& beta = need(a.d.beta, "beta", n);
  if (a.method == "recursion")
    return a.exact ? bessel_moments_recursive(rat(nu, "nu"), rat(beta, "beta"), N)
                   : bessel_moments_recursive(to_number(nu, "nu"), to_number(beta, "beta"), N);
  return a.exact ? bessel_moments_closed(rat(nu, "nu"), rat(beta, "beta"), N)
                 : bessel_moments_closed(to_number(nu, "nu"), to_number(beta, "beta"), N);
}

int run_moments(const MomentsArgs& a) {
  const MomentTable t = compute_moments(a);
  json meta = meta_json("moments", &a.d, t.params);
  meta["n_max"] = a.n_max;
  meta["method"] = to_string(t.method);
  meta["exact"] = a.exact;
  if (t.lambda) meta["lambda"] = *t.lambda;
  if (a.common.format == "csv") {
    emit(a.common, t.to_csv(), meta);
  } else {
    json j = json::parse(t.to_json());
    j["meta"] = meta;
    emit(a.common, j.dump(2), meta);
  }
  return 0;
}

// --- mgf ---------------------------------------------------------------------

struct MgfArgs {
  Common common;
  DiffusionArgs d;
  double lambda = 1.0;
  double r = 1.0;
  std::optional<double> q;
  double x = 0.0;
  double alpha = 0.0;
  std::string side = "plus";
  std::string method = "quadrature";
};

int run_mgf(const MgfArgs& a) {
  if (a.d.diffusion == "spider") throw ParameterError("mgf needs a diffusion with a Green kernel");
  const ParamMap params = param_map(a.d);
  MgfValue v;
  if (a.q) {
    const auto spec = make_diffusion(a.d.diffusion, params);
    v = mgf_two_sided(*spec, a.lambda, a.r, *a.q, a.side == "plus" ? ZeroSide::plus : ZeroSide::minus, a.alpha);
  } else if (a.method == "closed") {
    if (a.d.diffusion != "bessel" && a.d.diffusion != "bm")
      throw ParameterError("--method closed is available for bessel and bm only");
    if (a.x != 0.0) throw ParameterError("--method closed evaluates at x = 0 only");
    const double nu = a.d.diffusion == "bm" ? -0.5 : params.at("nu");
    const double beta = a.d.diffusion == "bm" ? 0.5 : params.at("beta");
    v = mgf_bessel_closed(nu, beta, a.lambda, a.r);
    v.diffusion = a.d.diffusion;
    v.params = params;
  } else {
    const auto spec = make_diffusion(a.d.diffusion, params);
    v = mgf_exp_time(*spec, a.lambda, a.r, a.x);
  }
  json meta = meta_json("mgf", &a.d, params);
  if (a.common.format == "json") {
    json j = json::parse(v.to_json());
    j["meta"] = meta;
    emit(a.common, j.dump(2), meta);
  } else {
    std::ostringstream os;
    os << "lambda,r,q,x,alpha,side,method,value\n"
       << format_double(v.lambda) << ',' << format_double(v.r) << ',' << format_double(v.q) << ','
       << format_double(v.x) << ',' << format_double(v.alpha) << ',' << v.side << ',' << to_string(v.method) << ','
       << format_double(v.value) << '\n';
    emit(a.common, os.str(), meta);
  }
  return 0;
}

// --- density -----------------------------------------------------------------

struct DensityArgs {
  Common common;
  DiffusionArgs d;
  std::string x;
  unsigned points = 0;
};

int run_density(const DensityArgs& a) {
  const ParamMap params = param_map(a.d);
  const OccupationDensity law = occupation_law(*make_diffusion(a.d.diffusion, params));
  std::vector<double> xs;
  if (!a.x.empty()) {
    for (const auto& s : split_list(a.x)) xs.push_back(to_number(s, "x"));
  } else {
    const unsigned n = a.points ? a.points : 19;
    for (unsigned i = 1; i <= n; ++i) xs.push_back(static_cast<double>(i) / (n + 1));
  }
  for (double x : xs)
    if (!(x > 0.0 && x < 1.0)) throw ParameterError("--x: densities are evaluated on (0, 1), got " + format_double(x));
  const std::vector<double> cdf = law.cdf(xs);
  json meta = meta_json("density", &a.d, params);
  meta["family"] = to_string(law.family());
  meta["law_params"] = params_json(law.params());
  if (a.common.format == "csv") {
    std::ostringstream os;
    os << "x,pdf,cdf\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      os << format_double(xs[i]) << ',' << format_double(law.pdf(xs[i])) << ',' << format_double(cdf[i]) << '\n';
    emit(a.common, os.str(), meta);
  } else {
    json j;
    j["meta"] = meta;
    auto rows = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({{"x", xs[i]}, {"pdf", law.pdf(xs[i])}, {"cdf", cdf[i]}});
    j["rows"] = rows;
    emit(a.common, j.dump(2), meta);
  }
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  Common common;
  DiffusionArgs d;
  std::uint64_t paths = 100000;
  double step = 1e-4;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  unsigned n_max = 2;
  std::string samples;
  bool no_ks = false;
};

int run_simulate(const SimulateArgs& a) {
  SimConfig cfg;
  cfg.diffusion = a.d.diffusion;
  cfg.params = param_map(a.d);
  if (cfg.diffusion == "spider") {
    cfg.spider_p = spider_probabilities(a.d);
    cfg.spider_rays = spider_rays(a.d);
  }
  cfg.paths = a.paths;
  cfg.step = a.step;
  cfg.horizon = a.horizon;
  cfg.seed = a.seed;
  cfg.workers = a.common.workers;
  cfg.validate();
  if (a.n_max < 1 || a.n_max > kMaxMomentOrder) throw ParameterError("--n-max out of range");

  const SimResult r = simulate(cfg);
  if (!a.samples.empty()) {
    std::ofstream f(a.samples);
    if (!f) throw std::runtime_error("cannot open samples file '" + a.samples + "'");
    f << samples_to_csv(r);
  }

  json meta = meta_json("simulate", &a.d, cfg.params);
  meta["paths"] = cfg.paths;
  meta["step"] = cfg.step;
  meta["horizon"] = cfg.horizon;
  meta["seed"] = cfg.seed;
  meta["workers"] = cfg.workers;
  meta["simd"] = to_string(r.simd);
  meta["scheme"] = to_string(r.scheme);
  meta["effective_step"] = r.effective_step;
  meta["spatial_step"] = r.spatial_step;
  meta["walk_beta"] = r.walk_beta;
  meta["bias_note"] = r.bias_note;

  const MomentTable mc = estimate_moments(r, a.n_max);
  std::vector<double> exact;
  if (cfg.diffusion != "sticky") exact = analytic_moments(cfg, a.n_max);

  json j;
  j["meta"] = meta;
  auto rows = json::array();
  for (unsigned n = 1; n <= a.n_max; ++n) {
    json row{{"n", n}, {"estimate", mc[n]}, {"std_error", mc.std_errors[n - 1]}};
    if (!exact.empty()) {
      row["analytic"] = exact[n - 1];
      row["z"] = mc.std_errors[n - 1] > 0 ? (mc[n] - exact[n - 1]) / mc.std_errors[n - 1] : 0.0;
    }
    rows.push_back(row);
  }
  j["moments_a"] = rows;
  if (cfg.diffusion == "sticky") {
    const MomentTable b = estimate_moments_b(r, a.n_max);
    auto brows = json::array();
    for (unsigned n = 1; n <= a.n_max; ++n)
      brows.push_back({{"n", n}, {"estimate", b[n]}, {"std_error", b.std_errors[n - 1]}});
    j["moments_b"] = brows;
    std::vector<double> z(r.samples.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = r.samples[i].zero_time;
    const MeanEstimate e = jackknife_mean(z);
    j["zero_time"] = {{"mean", e.mean}, {"std_error", e.std_error}};
  }
  const bool has_law = cfg.diffusion == "bm" || cfg.diffusion == "skew-bm" || cfg.diffusion == "bessel" ||
                       cfg.diffusion == "oscillating";
  if (has_law && !a.no_ks) {
    const OccupationDensity law = occupation_law(*make_diffusion(cfg.diffusion, cfg.params));
    std::vector<double> x(r.samples.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = r.samples[i].a_t / cfg.horizon;
    const double lattice = r.scheme == Scheme::skew_walk ? r.effective_step / cfg.horizon : 0.0;
    const KsResult ks = ks_test(x, law, lattice);
    j["ks"] = {{"law", to_string(law.family())}, {"n", ks.n},           {"statistic", ks.statistic},
               {"p_value", ks.p_value},          {"pass_1pct", ks.pass_1pct}, {"lattice", lattice}};
  }
  if (a.common.format == "csv") {
    std::string csv = mc.to_csv();
    emit(a.common, csv, j);
  } else {
    emit(a.common, j.dump(2), meta);
  }
  return 0;
}

// --- invert ------------------------------------------------------------------

struct InvertArgs {
  Common common;
  std::string diffusion = "sticky";
  double gamma = 1.0;
  unsigned n = 1;
  std::string t = "1";
  unsigned order = 32;
  double rel_tol = 1e-6;
};

int run_invert(const InvertArgs& a) {
  if (a.diffusion != "sticky") throw ParameterError("invert supports --diffusion sticky only");
  if (!(a.gamma >= 0.0)) throw ParameterError("--gamma must be nonnegative");
  if (a.n < 1 || a.n > kMaxMomentOrder) throw ParameterError("--n must lie in [1, 60]");
  InversionOptions opts;
  opts.order = a.order;
  opts.rel_tol = a.rel_tol;
  opts.throw_on_failure = false;
  std::vector<InversionResult> res;
  for (const auto& s : split_list(a.t)) {
    const double t = to_number(s, "t");
    if (!(t > 0.0)) throw ParameterError("--t: times must be positive");
    res.push_back(sticky_time_moment(a.gamma, a.n, t, opts));
  }
  json meta;
  meta["tool"] = "occtime";
  meta["version"] = OCCTIME_VERSION;
  meta["command"] = "invert";
  meta["diffusion"] = "sticky";
  meta["params"] = {{"gamma", a.gamma}};
  meta["n"] = a.n;
  meta["order"] = a.order;
  meta["rel_tol"] = a.rel_tol;
  bool all_ok = true;
  for (const auto& r : res) all_ok = all_ok && r.converged;
  if (a.common.format == "csv") {
    std::ostringstream os;
    os << "t,value,error_estimate\n";
    for (const auto& r : res)
      os << format_double(r.t) << ',' << format_double(r.value) << ',' << format_double(r.error_estimate) << '\n';
    emit(a.common, os.str(), meta);
  } else {
    json j;
    j["meta"] = meta;
    auto rows = json::array();
    for (const auto& r : res)
      rows.push_back({{"t", r.t}, {"value", r.value}, {"error_estimate", r.error_estimate}, {"converged", r.converged}});
    j["rows"] = rows;
    emit(a.common, j.dump(2), meta);
  }
  if (!all_ok) {
    std::cerr << "warning: inversion error estimate above tolerance at some t\n";
    return kExitFailure;
  }
  return 0;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string scale = "quick";
  std::string only;
  std::uint64_t seed = VerifyOptions{}.seed;
};

int run_verify(const VerifyArgs& a) {
  VerifyOptions o;
  o.scale = parse_verify_scale(a.scale);
  o.seed = a.seed;
  o.workers = a.common.workers;
  for (const auto& s : split_list(a.only)) o.only.push_back(static_cast<unsigned>(to_number(s, "only")));
  const VerifyReport r = run_verification(o, [](const VerifyCriterion& c) {
    std::fprintf(stderr, "[%s] %2u %s (%.1f s)\n", c.pass() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
  });
  Common out = a.common;
  out.format = "json";
  json j = json::parse(r.to_json());
  j["version"] = OCCTIME_VERSION;
  emit(out, j.dump(2), json{});
  return r.pass() ? 0 : kExitFailure;
}

// --- config files ------------------------------------------------------------

// Reads "key = value" lines ('#' starts a comment). Keys are long flag names
// without the leading dashes; "command" names the subcommand.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

// Splices config-file entries in front of the command-line flags, skipping
// keys the command line already sets.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  std::vector<std::string> extra;
  std::string command;
  for (const auto& [k, v] : read_config(path)) {
    if (k == "command") {
      command = v;
      continue;
    }
    if (given.count(k)) continue;
    if (v == "true") extra.push_back("--" + k);
    else if (v != "false") {
      extra.push_back("--" + k);
      extra.push_back(v);
    }
  }
  const bool has_command = !args.empty() && args[0].rfind("-", 0) != 0;
  if (!has_command) {
    if (command.empty()) throw ParameterError("config file names no command and none was given");
    args.insert(args.begin(), command);
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupation times of one-dimensional diffusions", "occtime"};
  app.set_version_flag("--version", OCCTIME_VERSION);
  app.require_subcommand(1);
  app.add_option("--config", "Key/value config file; command-line flags override it");

  const std::vector<std::string> all = {"bm", "skew-bm", "bessel", "oscillating", "spider", "sticky"};
  const std::vector<std::string> with_green = {"bm", "skew-bm", "bessel", "oscillating", "sticky"};
  const std::vector<std::string> with_law = {"bm", "skew-bm", "bessel", "oscillating"};

  MomentsArgs ma;
  auto* moments = app.add_subcommand("moments", "Moments E_0(A_1^n), or U_n(lambda) for sticky BM");
  add_common(moments, ma.common);
  add_diffusion(moments, ma.d, all);
  moments->add_option("--n-max", ma.n_max, "Largest order")->check(CLI::Range(1u, kMaxMomentOrder));
  moments->add_option("--lambda", ma.lambda, "Laplace variable (sticky, or --method quadrature)");
  moments->add_flag("--exact", ma.exact, "Exact rational arithmetic; inputs read as rationals");
  moments->add_option("--method", ma.method, "closed, recursion (bessel) or quadrature")
      ->check(CLI::IsMember({"closed", "recursion", "quadrature"}));

  MgfArgs ga;
  auto* mgf = app.add_subcommand("mgf", "E_x exp(-r A_T) with T ~ Exp(lambda); two-sided with --q");
  add_common(mgf, ga.common);
  add_diffusion(mgf, ga.d, with_green);
  mgf->add_option("--lambda", ga.lambda, "Rate of the exponential time")->check(CLI::PositiveNumber);
  mgf->add_option("--r", ga.r, "Weight of time at or above 0")->check(CLI::NonNegativeNumber);
  mgf->add_option("--q", ga.q, "Weight of time below the threshold (two-sided)")->check(CLI::NonNegativeNumber);
  mgf->add_option("--x", ga.x, "Starting point");
  mgf->add_option("--alpha", ga.alpha, "Threshold of the two-sided split");
  mgf->add_option("--side", ga.side, "Which side owns the threshold")->check(CLI::IsMember({"plus", "minus"}));
  mgf->add_option("--method", ga.method, "quadrature or closed (bessel, bm)")
      ->check(CLI::IsMember({"quadrature", "closed"}));

  DensityArgs da;
  auto* density = app.add_subcommand("density", "Density and cdf of A_1 on (0, 1)");
  add_common(density, da.common);
  add_diffusion(density, da.d, with_law);
  density->add_option("--x", da.x, "Comma-separated points in (0, 1)");
  density->add_option("--points", da.points, "Uniform interior grid size (default 19)");

  SimulateArgs sa;
  sa.common.format = "json";
  auto* sim = app.add_subcommand("simulate", "Monte Carlo occupation times");
  add_common(sim, sa.common);
  add_diffusion(sim, sa.d, all);
  sim->add_option("--paths", sa.paths, "Number of paths")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32));
  sim->add_option("--step", sa.step, "Time step (grid spacing sqrt(step))")->check(CLI::PositiveNumber);
  sim->add_option("--horizon", sa.horizon, "Time horizon t")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed, "Master seed");
  sim->add_option("--n-max", sa.n_max, "Moments to estimate");
  sim->add_option("--samples", sa.samples, "Write per-path samples as CSV");
  sim->add_flag("--no-ks", sa.no_ks, "Skip the Kolmogorov-Smirnov test");

  InvertArgs ia;
  auto* inv = app.add_subcommand("invert", "E_0(B_t^n) for sticky BM by Laplace inversion");
  add_common(inv, ia.common);
  inv->add_option("--diffusion", ia.diffusion, "Only sticky")->check(CLI::IsMember({"sticky"}));
  inv->add_option("--gamma", ia.gamma, "Stickiness");
  inv->add_option("--n", ia.n, "Moment order");
  inv->add_option("--t", ia.t, "Comma-separated times");
  inv->add_option("--order", ia.order, "Talbot order M")->check(CLI::Range(4u, 256u));
  inv->add_option("--rel-tol", ia.rel_tol, "Tolerance on |f_M - f_{M/2}| / |f_M|")->check(CLI::PositiveNumber);

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Run the cross-validation matrix; JSON report");
  add_common(ver, va.common, false);
  ver->add_option("--scale", va.scale, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  ver->add_option("--only", va.only, "Comma-separated criterion ids");
  ver->add_option("--seed", va.seed, "Master seed of the Monte Carlo checks");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(std::move(args));
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const Common* common = nullptr;
    if (cmd == moments) common = &ma.common;
    else if (cmd == mgf) common = &ga.common;
    else if (cmd == density) common = &da.common;
    else if (cmd == sim) common = &sa.common;
    else if (cmd == inv) common = &ia.common;
    else common = &va.common;
    apply_simd(*common);

    if (cmd == moments) return run_moments(ma);
    if (cmd == mgf) return run_mgf(ga);
    if (cmd == density) return run_density(da);
    if (cmd == sim) return run_simulate(sa);
    if (cmd == inv) return run_invert(ia);
    return run_verify(va);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
