#include "occtime/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <optional>

#include "json.hpp"
#include "occtime/densities.hpp"
#include "occtime/diffusion.hpp"
#include "occtime/ks.hpp"
#include "occtime/laplace.hpp"
#include "occtime/mgf.hpp"
#include "occtime/moments.hpp"
#include "occtime/montecarlo.hpp"
#include "occtime/special_fn.hpp"

namespace occtime {

std::string to_string(VerifyScale s) { return s == VerifyScale::quick ? "quick" : "full"; }

VerifyScale parse_verify_scale(const std::string& text) {
  if (text == "quick") return VerifyScale::quick;
  if (text == "full") return VerifyScale::full;
  throw ParameterError("scale must be 'quick' or 'full', got '" + text + "'");
}

bool VerifyCriterion::pass() const {
  if (checks.empty()) return false;
  if (budget_seconds > 0.0 && seconds > budget_seconds) return false;
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

bool VerifyReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const VerifyCriterion& c) { return c.pass(); });
}

namespace {

// JSON has no infinities; those are reported as strings.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string VerifyReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["scale"] = to_string(options.scale);
  j["seed"] = options.seed;
  j["workers"] = options.workers;
  j["pass"] = pass();
  j["seconds"] = seconds;
  auto crit = nlohmann::ordered_json::array();
  for (const auto& c : criteria) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["title"] = c.title;
    jc["status"] = c.pass() ? "pass" : "fail";
    jc["seconds"] = c.seconds;
    if (c.budget_seconds > 0.0) jc["budget_seconds"] = c.budget_seconds;
    auto checks = nlohmann::ordered_json::array();
    for (const auto& k : c.checks) {
      nlohmann::ordered_json jk;
      jk["name"] = k.name;
      jk["status"] = k.pass ? "pass" : "fail";
      jk["value"] = number(k.value);
      jk["tolerance"] = number(k.tolerance);
      if (!k.detail.empty()) jk["detail"] = k.detail;
      checks.push_back(std::move(jk));
    }
    jc["checks"] = std::move(checks);
    crit.push_back(std::move(jc));
  }
  j["criteria"] = std::move(crit);
  return j.dump(indent);
}

namespace {

struct Context {
  const VerifyOptions& opts;
  // The Lamperti sample is shared by the first-moment and KS criteria.
  std::optional<SimResult> bessel_sample;
  double bessel_seconds = 0.0;
  // Time spent earlier on shared work, charged to the running criterion.
  double extra_seconds = 0.0;

  std::uint64_t paths() const { return opts.scale == VerifyScale::quick ? 100000 : 400000; }
  double walk_step() const { return opts.scale == VerifyScale::quick ? 1e-5 : 2.5e-6; }
};

// Worst relative deviation, guarded for exact zeros.
double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

VerifyCheck le(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const std::vector<double>& nu_grid() {
  static const std::vector<double> g{-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1};
  return g;
}
const std::vector<double>& beta_grid() {
  static const std::vector<double> g{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  return g;
}

// --- 1 ----------------------------------------------------------------------

void arcsine_moments(Context&, VerifyCriterion& c) {
  c.title = "arcsine moments of Brownian motion";
  c.budget_seconds = 1.0;
  const MomentTable t = bm_moments(20);
  unsigned mismatches = 0;
  // C(2n, n) / 4^n as the running product of (2k - 1) / (2k).
  BigRational ref(1);
  for (unsigned n = 1; n <= 20; ++n) {
    ref *= BigRational(2 * n - 1, 2 * n);
    if (t.exact_values.at(n - 1) != ref) ++mismatches;
  }
  c.checks.push_back(le("exact equality n <= 20", mismatches, 0, "orders whose rational value differs"));
  const bool spots = t.exact_values[0] == BigRational(1, 2) && t.exact_values[1] == BigRational(3, 8) &&
                     t.exact_values[2] == BigRational(5, 16);
  c.checks.push_back({"spot values 1/2, 3/8, 5/16", spots, spots ? 0.0 : 1.0, 0.0,
                      format_rational(t.exact_values[0]) + ", " + format_rational(t.exact_values[1]) + ", " +
                          format_rational(t.exact_values[2])});
}

// --- 2 ----------------------------------------------------------------------

void bessel_recursion_vs_closed(Context&, VerifyCriterion& c) {
  c.title = "skew Bessel recursion against the Stirling closed form";
  c.budget_seconds = 10.0;
  double worst = 0.0;
  std::string where;
  for (double nu : nu_grid())
    for (double beta : beta_grid()) {
      const auto rec = bessel_recursive_values(nu, beta, 12);
      const auto closed = bessel_closed_values(nu, beta, 12);
      for (unsigned n = 0; n < 12; ++n) {
        const double d = rel_diff(rec[n], closed[n]);
        if (d > worst) {
          worst = d;
          where = "nu=" + fmt(nu) + " beta=" + fmt(beta) + " n=" + std::to_string(n + 1);
        }
      }
    }
  c.checks.push_back(le("relative gap on 81-point grid, n <= 12", worst, 1e-12, where));

  unsigned mismatches = 0;
  const BigRational half_nu(-1, 2);
  for (int b = 1; b <= 9; ++b) {
    const BigRational beta(b, 10);
    const auto closed = bessel_closed_values(half_nu, beta, 12);
    const auto rec = bessel_recursive_values(half_nu, beta, 12);
    for (unsigned n = 1; n <= 12; ++n)
      if (closed[n - 1] != skew_bm_moment(beta, n) || rec[n - 1] != closed[n - 1]) ++mismatches;
  }
  c.checks.push_back(le("exact skew-BM reduction at nu = -1/2", mismatches, 0, "beta = k/10, n <= 12"));
}

// --- 3 ----------------------------------------------------------------------

void density_moments(Context&, VerifyCriterion& c) {
  c.title = "quadrature moments of the Lamperti density";
  c.budget_seconds = 60.0;
  double worst = 0.0, worst_mass = 0.0;
  std::string where;
  for (double nu : nu_grid())
    for (double beta : beta_grid()) {
      const OccupationDensity d = OccupationDensity::lamperti(nu, beta);
      const auto closed = bessel_closed_values(nu, beta, 8);
      worst_mass = std::max(worst_mass, std::fabs(density_moment_oracle(d, 0) - 1.0));
      for (unsigned n = 1; n <= 8; ++n) {
        const double e = std::fabs(density_moment_oracle(d, n) - closed[n - 1]);
        if (e > worst) {
          worst = e;
          where = "nu=" + fmt(nu) + " beta=" + fmt(beta) + " n=" + std::to_string(n);
        }
      }
    }
  c.checks.push_back(le("absolute gap on 81-point grid, n <= 8", worst, 1e-8, where));
  c.checks.push_back(le("total mass", worst_mass, 1e-8));
}

// --- 4 ----------------------------------------------------------------------

const SimResult& bessel_sample(Context& ctx) {
  if (!ctx.bessel_sample) {
    SimConfig cfg;
    cfg.diffusion = "bessel";
    cfg.params = {{"nu", -0.3}, {"beta", 0.6}};
    cfg.step = 1e-3;
    cfg.paths = ctx.paths();
    cfg.seed = ctx.opts.seed;
    cfg.workers = ctx.opts.workers;
    const auto t0 = std::chrono::steady_clock::now();
    ctx.bessel_sample = simulate(cfg);
    ctx.bessel_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    ctx.extra_seconds = ctx.bessel_seconds;
  }
  return *ctx.bessel_sample;
}

void first_moment(Context& ctx, VerifyCriterion& c) {
  c.title = "first moment equals beta three ways";
  double worst_closed = 0.0, worst_quad = 0.0;
  for (double nu : {-0.8, -0.5, -0.3, -0.1})
    for (double beta : {0.2, 0.6, 0.9}) {
      worst_closed = std::max(worst_closed, std::fabs(bessel_closed_values(nu, beta, 1)[0] - beta));
      const SkewBessel proc(nu, beta);
      for (double lambda : {0.5, 2.0})
        worst_quad = std::max(worst_quad, std::fabs(generic_laplace_moments(proc, lambda, 1).table[1] - beta));
    }
  c.checks.push_back(le("closed form", worst_closed, 1e-15, "nu in {-0.8,-0.5,-0.3,-0.1}, beta in {0.2,0.6,0.9}"));
  c.checks.push_back(le("Green-kernel quadrature", worst_quad, 1e-10, "same grid, lambda in {0.5, 2}"));

  const SimResult& r = bessel_sample(ctx);
  const MomentTable m = estimate_moments(r, 1);
  const double z = std::fabs(m[1] - 0.6) / m.std_errors[0];
  c.checks.push_back(le("Monte Carlo |z| at nu=-0.3, beta=0.6", z, 4.0,
                        "mean " + fmt(m[1]) + " se " + fmt(m.std_errors[0]) + ", " +
                            std::to_string(r.samples.size()) + " paths"));
}

// --- 5 ----------------------------------------------------------------------

void mgf_equivalence(Context&, VerifyCriterion& c) {
  c.title = "MGF quadrature against the skew Bessel closed form";
  double worst = 0.0;
  std::string where;
  for (double nu : {-0.8, -0.5, -0.2})
    for (double beta : {0.2, 0.5, 0.8}) {
      const SkewBessel proc(nu, beta);
      for (double lambda : {0.5, 2.0})
        for (double r : {0.3, 3.0}) {
          const double d =
              rel_diff(mgf_exp_time(proc, lambda, r).value, mgf_bessel_closed(nu, beta, lambda, r).value);
          if (d > worst) {
            worst = d;
            where = "nu=" + fmt(nu) + " beta=" + fmt(beta) + " lambda=" + fmt(lambda) + " r=" + fmt(r);
          }
        }
    }
  c.checks.push_back(le("relative gap on (nu, beta, lambda, r) grid", worst, 1e-10, where));

  double worst_bm = 0.0;
  const SkewBM bm(0.5);
  for (double lambda : {0.5, 1.0, 2.0})
    for (double r : {0.3, 1.0, 3.0}) {
      const double exact = std::sqrt(lambda / (lambda + r));
      worst_bm = std::max({worst_bm, rel_diff(mgf_exp_time(bm, lambda, r).value, exact),
                           rel_diff(mgf_bessel_closed(-0.5, 0.5, lambda, r).value, exact)});
    }
  c.checks.push_back(le("Brownian motion against sqrt(lambda/(lambda+r))", worst_bm, 1e-12));
}

// --- 6 ----------------------------------------------------------------------

void two_sided(Context&, VerifyCriterion& c) {
  c.title = "two-sided MGF reductions and the sticky-point side";
  std::vector<DiffusionPtr> specs{make_skew_bm(0.7), make_skew_bessel(-0.3, 0.6), make_oscillating_bm(2.0, 1.0),
                                  make_sticky_bm(1.0)};
  double worst_q0 = 0.0, worst_rq = 0.0;
  for (const auto& s : specs)
    for (double lambda : {0.5, 2.0})
      for (double r : {0.3, 3.0}) {
        worst_q0 = std::max(worst_q0, rel_diff(mgf_two_sided(*s, lambda, r, 0.0).value,
                                               mgf_exp_time(*s, lambda, r).value));
        worst_rq = std::max(worst_rq, std::fabs(mgf_two_sided(*s, lambda, r, r).value - lambda / (lambda + r)));
      }
  c.checks.push_back(le("q = 0 against the one-sided MGF", worst_q0, 1e-10));
  c.checks.push_back(le("r = q collapses to lambda/(lambda+r)", worst_rq, 1e-12));

  auto gap = [](double gamma) {
    const StickyBM s(gamma);
    return std::fabs(mgf_two_sided(s, 1.0, 1.5, 0.7, ZeroSide::plus).value -
                     mgf_two_sided(s, 1.0, 1.5, 0.7, ZeroSide::minus).value);
  };
  const double g1 = gap(1.0);
  c.checks.push_back({"sides differ at gamma = 1", g1 > 1e-3, g1, 1e-3, "lambda=1 r=1.5 q=0.7; must exceed"});
  std::vector<double> gaps;
  for (double gamma : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) gaps.push_back(gap(gamma));
  bool shrinking = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) shrinking = shrinking && gaps[i] < gaps[i - 1];
  c.checks.push_back({"side gap vanishes as gamma -> 0", shrinking && gaps.back() <= 1e-5, gaps.back(), 1e-5,
                      shrinking ? "decreasing over gamma = 1e-1 .. 1e-6" : "not monotone"});
}

// --- 7 ----------------------------------------------------------------------

void dk_checks(Context&, VerifyCriterion& c) {
  c.title = "D_k coefficients";
  double worst = 0.0, worst_lambda = 0.0;
  std::string where;
  for (double nu : {-0.7, -0.3})
    for (double beta : {0.3, 0.6}) {
      const SkewBessel proc(nu, beta);
      for (unsigned k = 1; k <= 6; ++k) {
        std::vector<double> v;
        for (double lambda : {0.5, 1.0, 2.0}) v.push_back(generic_dk(proc, lambda, k));
        const double e = std::fabs(v[1] - bessel_dk(nu, beta, k));
        if (e > worst) {
          worst = e;
          where = "nu=" + fmt(nu) + " beta=" + fmt(beta) + " k=" + std::to_string(k);
        }
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        worst_lambda = std::max(worst_lambda, *hi - *lo);
      }
    }
  c.checks.push_back(le("quadrature against beta C(nu+k-1, k), k <= 6", worst, 1e-8, where));
  c.checks.push_back(le("spread over lambda in {0.5, 1, 2}", worst_lambda, 1e-10));

  double worst_sticky = 0.0;
  for (double gamma : {0.5, 1.0, 3.0}) {
    const StickyBM s(gamma);
    for (double lambda : {0.5, 1.0, 2.0}) {
      const double gap = generic_dk(s, lambda, 1, true) - generic_dk(s, lambda, 1, false);
      const double expected = -sticky_h(gamma, lambda) * gamma * std::sqrt(2.0 * lambda);
      worst_sticky = std::max(worst_sticky, std::fabs(gap - expected));
    }
  }
  c.checks.push_back(le("sticky D_1 gap against -H gamma sqrt(2 lambda)", worst_sticky, 1e-10));
}

// --- 8 ----------------------------------------------------------------------

void stirling_identities(Context&, VerifyCriterion& c) {
  c.title = "Stirling number identities";
  c.budget_seconds = 5.0;
  const StirlingCache& st = StirlingCache::instance();
  unsigned bad_rec = 0;
  for (unsigned n = 0; n < 60; ++n)
    for (unsigned k = 1; k <= n + 1; ++k) {
      if (st.first_kind(n + 1, k) != BigInt(n) * st.first_kind(n, k) + st.first_kind(n, k - 1)) ++bad_rec;
      if (st.second_kind(n + 1, k) != BigInt(k) * st.second_kind(n, k) + st.second_kind(n, k - 1)) ++bad_rec;
    }
  for (unsigned n = 1; n <= 60; ++n)
    if (st.first_kind(n, 0) != 0 || st.second_kind(n, 0) != 0 || st.first_kind(0, n) != 0 ||
        st.second_kind(0, n) != 0)
      ++bad_rec;
  if (st.first_kind(0, 0) != 1 || st.second_kind(0, 0) != 1) ++bad_rec;
  c.checks.push_back(le("three-term recurrences and boundary values, n <= 60", bad_rec, 0));

  unsigned bad_lemma = 0;
  for (unsigned n = 0; n <= 12; ++n)
    for (unsigned m = 0; m <= 12; ++m)
      for (unsigned l = 0; l <= 12; ++l) {
        const BigInt lhs = st.first_kind(n + 1, l + m + 1) * binomial(l + m, l);
        BigInt rhs = 0;
        for (unsigned k = l; k + m <= n; ++k)
          rhs += st.first_kind(k + 1, l + 1) * st.first_kind(n - k, m) * binomial(n, k);
        if (lhs != rhs) ++bad_lemma;
      }
  c.checks.push_back(le("convolution identity for first-kind numbers, n, m, l <= 12", bad_lemma, 0));

  unsigned bad_bss = 0;
  for (unsigned n = 1; n <= 12; ++n)
    for (unsigned k = 1; k <= n; ++k) {
      BigInt lhs = 0, pow2 = 1;  // (-2)^{n-i}, built from i = n downwards
      for (unsigned i = n; i >= k; --i) {
        lhs += st.first_kind(n, i) * st.second_kind(i, k) * pow2;
        pow2 *= -2;
        if (i == k) break;
      }
      // (-1)^{n-k} (2n-k-1)! / (2^{n-k} (k-1)! (n-k)!)
      BigRational rhs(factorial(2 * n - k - 1), (BigInt(1) << (n - k)) * factorial(k - 1) * factorial(n - k));
      if ((n - k) % 2 == 1) rhs = -rhs;
      if (BigRational(lhs) != rhs) ++bad_bss;
    }
  c.checks.push_back(le("mixed Stirling sum with powers of -2, n <= 12", bad_bss, 0));
}

// --- 9 ----------------------------------------------------------------------

void sticky_limits(Context&, VerifyCriterion& c) {
  c.title = "sticky BM long-time limit";
  double worst = 0.0;
  std::string where;
  for (double gamma : {0.1, 1.0, 10.0})
    for (unsigned n = 1; n <= 5; ++n) {
      const TauberianReport r = tauberian_check(gamma, n, 1e-10);
      if (r.gap > worst) {
        worst = r.gap;
        where = "gamma=" + fmt(gamma) + " n=" + std::to_string(n);
      }
    }
  c.checks.push_back(le("lambda^{n+1} Bhat_n / n! at lambda = 1e-10 against C(2n,n)/4^n", worst, 1e-3, where));

  const InversionResult inv = sticky_time_moment(1.0, 1, 1000.0);
  const double ratio = inv.value / 1000.0;
  c.checks.push_back({"E(B_t)/t at t = 1000, gamma = 1 in [0.48, 0.52]", ratio >= 0.48 && ratio <= 0.52, ratio,
                      0.52, "inversion error estimate " + fmt(inv.error_estimate) + "; must lie in [0.48, 0.52]"});
}

// --- 10 ---------------------------------------------------------------------

void add_mc_checks(VerifyCriterion& c, const std::string& label, const SimResult& r, const OccupationDensity& law,
                   double lattice, const std::vector<double>& exact) {
  std::vector<double> a(r.samples.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = r.samples[i].a_t / r.config.horizon;
  const KsResult ks = ks_test(a, law, lattice);
  c.checks.push_back({label + " KS p-value", ks.pass_1pct, ks.p_value, 0.01,
                      "D=" + fmt(ks.statistic) + ", n=" + std::to_string(ks.n) + "; must be at least 0.01"});
  const MomentTable m = estimate_moments(r, 2);
  for (unsigned n = 1; n <= 2; ++n) {
    const double z = std::fabs(m[n] - exact[n - 1]) / m.std_errors[n - 1];
    c.checks.push_back(le(label + " moment " + std::to_string(n) + " |z|", z, 4.0,
                          "estimate " + fmt(m[n]) + " analytic " + fmt(exact[n - 1])));
  }
}

void monte_carlo_laws(Context& ctx, VerifyCriterion& c) {
  c.title = "Monte Carlo occupation laws";
  c.budget_seconds = ctx.opts.scale == VerifyScale::quick ? 300.0 : 0.0;
  SimConfig cfg;
  cfg.paths = ctx.paths();
  cfg.seed = ctx.opts.seed;
  cfg.workers = ctx.opts.workers;
  cfg.step = ctx.walk_step();

  cfg.diffusion = "bm";
  const SimResult bm = simulate(cfg);
  add_mc_checks(c, "arcsine", bm, OccupationDensity::arcsine(), bm.effective_step, bm_moments(2).values);

  cfg.diffusion = "skew-bm";
  cfg.params = {{"beta", 0.7}};
  const SimResult skew = simulate(cfg);
  add_mc_checks(c, "skew-BM beta=0.7", skew, OccupationDensity::skew_bm(0.7), skew.effective_step,
                skew_bm_moments(0.7, 2).values);

  add_mc_checks(c, "Lamperti nu=-0.3 beta=0.6", bessel_sample(ctx), OccupationDensity::lamperti(-0.3, 0.6), 0.0,
                bessel_closed_values(-0.3, 0.6, 2));
}

// --- 11 ---------------------------------------------------------------------

void hitting_derivative_decay(Context&, VerifyCriterion& c) {
  c.title = "hitting-transform derivatives vanish at the origin";
  std::vector<DiffusionPtr> specs{make_skew_bm(0.5), make_skew_bm(0.7), make_skew_bessel(-0.3, 0.6),
                                  make_oscillating_bm(2.0, 1.0), make_sticky_bm(1.0)};
  for (const auto& s : specs) {
    double worst_end = 0.0;
    bool monotone = true;
    std::string where;
    for (double lambda : {0.5, 2.0})
      for (unsigned k = 1; k <= 4; ++k) {
        double prev = INFINITY;
        for (int e = 1; e <= 6; ++e) {
          const double v = std::fabs(s->hitting_transform_deriv(std::pow(10.0, -e), lambda, k));
          if (!(v < prev)) monotone = false;
          prev = v;
        }
        if (prev > worst_end) {
          worst_end = prev;
          where = "lambda=" + fmt(lambda) + " k=" + std::to_string(k);
        }
      }
    std::string label = s->name();
    for (const auto& [key, v] : s->params()) label += " " + key + "=" + fmt(v);
    c.checks.push_back({label + ": |f^(k)(1e-6)|, decreasing from 1e-1", monotone && worst_end < 1e-5, worst_end,
                        1e-5, (monotone ? "monotone; largest at " : "NOT monotone; largest at ") + where});
  }
}

using CriterionFn = void (*)(Context&, VerifyCriterion&);

}  // namespace

VerifyReport run_verification(const VerifyOptions& opts, const std::function<void(const VerifyCriterion&)>& progress) {
  static const CriterionFn table[kCriterionCount] = {
      arcsine_moments, bessel_recursion_vs_closed, density_moments, first_moment, mgf_equivalence, two_sided,
      dk_checks, stirling_identities, sticky_limits, monte_carlo_laws, hitting_derivative_decay};
  for (unsigned id : opts.only)
    if (id < 1 || id > kCriterionCount) throw ParameterError("criterion id out of range: " + std::to_string(id));

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  VerifyReport report;
  report.options = opts;
  Context ctx{opts, std::nullopt, 0.0, 0.0};
  for (unsigned id = 1; id <= kCriterionCount; ++id) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    VerifyCriterion c;
    c.id = id;
    const auto t0 = clock::now();
    try {
      table[id - 1](ctx, c);
    } catch (const std::exception& e) {
      c.checks.push_back({"exception", false, NAN, 0.0, e.what()});
    }
    c.seconds = std::chrono::duration<double>(clock::now() - t0).count() + ctx.extra_seconds;
    ctx.extra_seconds = 0.0;
    report.criteria.push_back(c);
    if (progress) progress(report.criteria.back());
  }
  report.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return report;
}

}  // namespace occtime
