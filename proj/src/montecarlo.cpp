#include "occtime/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "occtime/format.hpp"
#include "occtime/rng.hpp"

namespace occtime {

namespace {

constexpr std::uint64_t kChunk = 1024;  // paths per work item, a multiple of the SIMD width

double param(const SimConfig& cfg, const std::string& key) {
  auto it = cfg.params.find(key);
  if (it == cfg.params.end()) throw ParameterError("missing parameter '" + key + "' for " + cfg.diffusion);
  return it->second;
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class Fn>
void parallel_chunks(std::uint64_t paths, unsigned workers, Fn fn) {
  const std::uint64_t chunks = (paths + kChunk - 1) / kChunk;
  std::atomic<std::uint64_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::uint64_t first = c * kChunk;
      fn(first, std::min(kChunk, paths - first));
    }
  };
  const unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(worker_count(workers), chunks));
  if (w <= 1) {
    body();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < w; ++i) pool.emplace_back(body);
  for (auto& t : pool) t.join();
}

std::uint32_t slot_count(const SimConfig& cfg) {
  const double s = std::round(cfg.horizon / cfg.step);
  if (s < 1.0 || s > 4.0e9) throw ParameterError("horizon / step must lie in [1, 4e9]");
  return static_cast<std::uint32_t>(s);
}

// Walk with skewness beta at 0 and, for sticky paths, geometric holding with
// continuation probability hold_prob per slot.
SimResult run_walk(const SimConfig& cfg, Scheme scheme, double beta, double hold_prob) {
  SimResult res;
  res.config = cfg;
  res.scheme = scheme;
  res.simd = active_simd_level();
  res.walk_beta = beta;
  const std::uint32_t slots = slot_count(cfg);
  const double h = cfg.horizon / slots;
  res.effective_step = h;
  res.spatial_step = std::sqrt(h);

  const double hold_count = std::floor(hold_prob * 2147483648.0);
  const double up_count = std::floor((2147483648.0 - hold_count) * beta);
  LatticeWalkParams p;
  p.slots = slots;
  p.hold_at_zero = static_cast<std::int32_t>(hold_count - 1.0);
  p.up_at_zero = static_cast<std::int32_t>(hold_count + up_count - 1.0);

  std::vector<LatticeWalkResult> raw(cfg.paths);
  parallel_chunks(cfg.paths, cfg.workers, [&](std::uint64_t first, std::uint64_t count) {
    lattice_walk(p, cfg.seed, first, count, raw.data() + first);
  });
  res.samples.resize(cfg.paths);
  for (std::uint64_t i = 0; i < cfg.paths; ++i) {
    OccupationSample& s = res.samples[i];
    s.path = i;
    s.b_t = raw[i].positive_slots * h;
    s.zero_time = raw[i].zero_slots * h;
    s.a_t = s.b_t + s.zero_time;
    s.terminal = raw[i].terminal * res.spatial_step;
  }
  return res;
}

void check_beta_closed(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("beta must lie in [0, 1]");
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::skew_walk: return "skew_walk";
    case Scheme::chain_approx: return "chain_approx";
    case Scheme::sticky_walk: return "sticky_walk";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("horizon must be positive");
  if (!(step > 0.0) || step > horizon) throw ParameterError("step must lie in (0, horizon]");
  if (paths < 1) throw ParameterError("paths must be at least 1");
  if (diffusion == "bm") return;
  if (diffusion == "skew-bm") {
    check_beta_closed(param(*this, "beta"));
  } else if (diffusion == "bessel") {
    const double nu = param(*this, "nu"), beta = param(*this, "beta");
    if (!(nu > -1.0 && nu < 0.0)) throw ParameterError("nu must lie in (-1, 0)");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
  } else if (diffusion == "oscillating") {
    if (!(param(*this, "sigma_plus") > 0.0) || !(param(*this, "sigma_minus") > 0.0))
      throw ParameterError("volatilities must be positive");
  } else if (diffusion == "sticky") {
    const double gamma = param(*this, "gamma");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be nonnegative");
    if (gamma > 0.0 && gamma / std::sqrt(step) < 1.0)
      throw ParameterError("spatial step sqrt(step) exceeds gamma: mean holding at 0 would be below one slot");
  } else if (diffusion == "spider") {
    if (spider_p.empty()) throw ParameterError("spider needs ray probabilities");
    double total = 0.0;
    for (double q : spider_p) {
      if (!(q >= 0.0)) throw ParameterError("ray probabilities must be nonnegative");
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("ray probabilities must sum to 1");
    for (unsigned r : spider_rays)
      if (r < 1 || r > spider_p.size()) throw ParameterError("ray index out of range");
  } else {
    throw ParameterError("unknown diffusion '" + diffusion + "'");
  }
}

SimResult simulate_skew_bm(const SimConfig& cfg) {
  cfg.validate();
  const double beta = cfg.diffusion == "bm" ? 0.5 : param(cfg, "beta");
  check_beta_closed(beta);
  SimResult r = run_walk(cfg, Scheme::skew_walk, beta, 0.0);
  r.bias_note = "skew random walk, steps +-sqrt(h); slot occupation by the sign of the interpolated path, "
                "so E(A_t) = beta t exactly and higher moments carry an O(sqrt(h)) bias";
  return r;
}

SimResult simulate_oscillating(const SimConfig& cfg) {
  cfg.validate();
  const double sp = param(cfg, "sigma_plus"), sm = param(cfg, "sigma_minus");
  SimResult r = run_walk(cfg, Scheme::skew_walk, sm / (sp + sm), 0.0);
  // X = sigma_{+/-} Y for the skew BM Y; the sign, hence A, is unchanged.
  for (auto& s : r.samples) s.terminal *= s.terminal >= 0.0 ? sp : sm;
  r.bias_note = "skew random walk at beta = sigma_minus / (sigma_plus + sigma_minus) mapped back by x = sigma y";
  return r;
}

SimResult simulate_spider(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.diffusion != "spider") throw ParameterError("simulate_spider needs diffusion 'spider'");
  // Excursions whose ray label falls in the query set are the upward ones
  // of a skew walk with beta = sum of their probabilities.
  double beta = 0.0;
  for (unsigned ray : cfg.spider_rays) beta += cfg.spider_p[ray - 1];
  SimResult r = run_walk(cfg, Scheme::skew_walk, std::min(beta, 1.0), 0.0);
  r.bias_note = "reflected walk with ray labels drawn per excursion; query rays map to the upper half-line";
  return r;
}

SimResult simulate_sticky(const SimConfig& cfg) {
  cfg.validate();
  const double gamma = param(cfg, "gamma");
  const std::uint32_t slots = slot_count(cfg);
  const double delta = std::sqrt(cfg.horizon / slots);
  // Extra slots at 0 per visit are geometric on {0, 1, ...} with mean
  // gamma / delta: the speed atom 2 gamma times delta / 2, in units of delta^2.
  const double mean_extra = gamma / delta;
  SimResult r = run_walk(cfg, Scheme::sticky_walk, 0.5, mean_extra / (1.0 + mean_extra));
  r.bias_note = "symmetric walk with geometric holding at 0 of mean gamma/sqrt(h) slots; B excludes holding slots";
  return r;
}

namespace {

// Speed measure of the skew Bessel process in the scale coordinate s: density
// c_plus s^{q-2} on s > 0 and c_minus |s|^{q-2} on s < 0, q = 1/|nu|.
struct ScaleSpeed {
  double q, c_plus, c_minus;

  // int_u^v dm and int_u^v s dm on one closed half-line.
  double mass(double u, double v) const {
    if (u >= 0.0) return c_plus * (std::pow(v, q - 1.0) - std::pow(u, q - 1.0)) / (q - 1.0);
    return c_minus * (std::pow(-u, q - 1.0) - std::pow(-v, q - 1.0)) / (q - 1.0);
  }
  double first(double u, double v) const {
    if (u >= 0.0) return c_plus * (std::pow(v, q) - std::pow(u, q)) / q;
    return -c_minus * (std::pow(-u, q) - std::pow(-v, q)) / q;
  }
  // Expected exit time from (a, b) started at x, split into the parts
  // spent below and above x (Green kernel of the interval against m).
  double below(double a, double x, double b) const { return (b - x) / (b - a) * (first(a, x) - a * mass(a, x)); }
  double above(double a, double x, double b) const { return (x - a) / (b - a) * (b * mass(x, b) - first(x, b)); }
};

}  // namespace

SimResult simulate_bessel(const SimConfig& cfg) {
  cfg.validate();
  const double nu = param(cfg, "nu"), beta = param(cfg, "beta");
  const double an = -nu;
  const double q = 1.0 / an;
  const ScaleSpeed sp{q, 8.0 * beta * beta * std::pow(4.0 * beta * an, q - 2.0),
                      8.0 * (1.0 - beta) * (1.0 - beta) * std::pow(4.0 * (1.0 - beta) * an, q - 2.0)};
  const SkewBessel proc(nu, beta);

  // Grid in x: geometric near 0, where the scale function has a power
  // singularity in slope, then uniform with spacing sqrt(step) where the
  // process moves like Brownian motion plus drift. The ratio keeps successive
  // scale increments within 10%. The innermost point fixes the time
  // resolution near 0 (holds there are of order x_1^2); the cdf of A_1 near
  // its ends behaves like x^{|nu|}, so x_1^{2|nu|} = kBesselEndMass keeps the
  // unresolved mass at each end near that value.
  constexpr double kBesselEndMass = 1e-3;
  const double dx = std::sqrt(cfg.step);
  const double root_t = std::sqrt(cfg.horizon);
  const double ratio = std::pow(1.1, 0.5 * q);
  const double x1 = std::min(dx, root_t * std::pow(kBesselEndMass, 0.5 * q));
  std::vector<double> xs{0.0, x1};
  while (xs.back() * (ratio - 1.0) < dx) xs.push_back(xs.back() * ratio);
  const double reach = 15.0 * root_t;
  if ((reach - xs.back()) / dx > 5.0e7) throw ParameterError("Bessel chain grid too fine for this horizon; increase step");
  while (xs.back() < reach) xs.push_back(xs.back() + dx);
  const std::int32_t m = static_cast<std::int32_t>(xs.size() - 1);
  const std::size_t n = 2 * static_cast<std::size_t>(m) + 1;

  std::vector<double> grid(n), s(n);
  for (std::int32_t i = -m; i <= m; ++i) {
    const std::size_t k = static_cast<std::size_t>(i + m);
    grid[k] = i < 0 ? -xs[static_cast<std::size_t>(-i)] : xs[static_cast<std::size_t>(i)];
    s[k] = proc.scale(grid[k]);
  }
  std::vector<double> hold(n), frac(n);
  std::vector<std::int32_t> up(n);
  for (std::size_t k = 0; k < n; ++k) {
    // End sites reflect: their neighbourhood is mirrored.
    const double x = s[k];
    const double a = k == 0 ? 2.0 * x - s[1] : s[k - 1];
    const double b = k + 1 == n ? 2.0 * x - s[n - 2] : s[k + 1];
    const double lo = sp.below(a, x, b), hi = sp.above(a, x, b);
    hold[k] = lo + hi;
    if (x > 0.0) frac[k] = 1.0;
    else if (x < 0.0) frac[k] = 0.0;
    else frac[k] = hi / (lo + hi);
    // Martingale in scale: P(up) = (x - a) / (b - a).
    up[k] = probability_threshold31((x - a) / (b - a));
  }
  up[0] = probability_threshold31(1.0);
  up[n - 1] = probability_threshold31(0.0);

  ChainWalkParams p;
  p.horizon = cfg.horizon;
  p.max_site = m;
  p.hold = hold.data();
  p.positive_fraction = frac.data();
  p.up_threshold = up.data();

  SimResult res;
  res.config = cfg;
  res.scheme = Scheme::chain_approx;
  res.simd = active_simd_level();
  res.walk_beta = beta;
  res.effective_step = hold[static_cast<std::size_t>(m)];
  res.spatial_step = dx;
  res.bias_note = "birth-death chain on a grid in x, geometric near 0 and uniform with spacing sqrt(step) beyond; jump probabilities make the scale function a "
                  "martingale and deterministic holds equal the expected exit times from the neighbouring cells; "
                  "the hold at the origin is split between the half-lines";

  std::vector<ChainWalkResult> raw(cfg.paths);
  parallel_chunks(cfg.paths, cfg.workers, [&](std::uint64_t first, std::uint64_t count) {
    chain_walk(p, cfg.seed, first, count, raw.data() + first);
  });
  res.samples.resize(cfg.paths);
  for (std::uint64_t i = 0; i < cfg.paths; ++i) {
    OccupationSample& o = res.samples[i];
    o.path = i;
    o.a_t = raw[i].occupation;
    o.b_t = o.a_t;
    o.zero_time = 0.0;
    o.terminal = grid[static_cast<std::size_t>(raw[i].terminal + m)];
  }
  return res;
}

SimResult simulate(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.diffusion == "bm" || cfg.diffusion == "skew-bm") return simulate_skew_bm(cfg);
  if (cfg.diffusion == "bessel") return simulate_bessel(cfg);
  if (cfg.diffusion == "oscillating") return simulate_oscillating(cfg);
  if (cfg.diffusion == "sticky") return simulate_sticky(cfg);
  return simulate_spider(cfg);
}

MeanEstimate jackknife_mean(const std::vector<double>& x) {
  MeanEstimate e;
  const std::size_t n = x.size();
  if (n == 0) return e;
  double sum = 0.0;
  for (double v : x) sum += v;
  e.mean = sum / n;
  if (n < 2) return e;
  // Leave-one-out means theta_i = (sum - x_i) / (n - 1).
  double ss = 0.0;
  for (double v : x) {
    const double d = (sum - v) / (n - 1.0) - e.mean;
    ss += d * d;
  }
  e.std_error = std::sqrt((n - 1.0) / n * ss);
  return e;
}

namespace {

MomentTable moments_of(const SimResult& r, unsigned N, bool use_b) {
  if (N < 1 || N > kMaxMomentOrder) throw ParameterError("moment order out of range");
  MomentTable t;
  t.diffusion = r.config.diffusion;
  t.params = r.config.params;
  if (r.config.diffusion == "spider") {
    for (std::size_t i = 0; i < r.config.spider_p.size(); ++i) t.params["p" + std::to_string(i + 1)] = r.config.spider_p[i];
  }
  t.method = MomentMethod::monte_carlo;
  std::vector<double> base(r.samples.size()), pw(r.samples.size(), 1.0);
  for (std::size_t i = 0; i < base.size(); ++i)
    base[i] = (use_b ? r.samples[i].b_t : r.samples[i].a_t) / r.config.horizon;
  for (unsigned n = 1; n <= N; ++n) {
    for (std::size_t i = 0; i < base.size(); ++i) pw[i] *= base[i];
    const MeanEstimate e = jackknife_mean(pw);
    t.values.push_back(e.mean);
    t.std_errors.push_back(e.std_error);
  }
  return t;
}

}  // namespace

MomentTable estimate_moments(const SimResult& r, unsigned N) { return moments_of(r, N, false); }
MomentTable estimate_moments_b(const SimResult& r, unsigned N) { return moments_of(r, N, true); }

std::vector<double> analytic_moments(const SimConfig& cfg, unsigned N) {
  if (cfg.diffusion == "bm") return bm_moments(N).values;
  if (cfg.diffusion == "skew-bm") return skew_bm_moments(param(cfg, "beta"), N).values;
  if (cfg.diffusion == "bessel") return bessel_closed_values(param(cfg, "nu"), param(cfg, "beta"), N);
  if (cfg.diffusion == "oscillating")
    return oscillating_moments(param(cfg, "sigma_plus"), param(cfg, "sigma_minus"), N).values;
  if (cfg.diffusion == "spider") return spider_moments(cfg.spider_p, cfg.spider_rays, N).values;
  throw ParameterError("no time-domain closed form for '" + cfg.diffusion + "'");
}

std::vector<KacCheck> kac_raw_moment_mc_check(const SimConfig& cfg, unsigned N) {
  const std::vector<double> exact = analytic_moments(cfg, N);
  const SimResult r = simulate(cfg);
  std::vector<double> pw(r.samples.size(), 1.0);
  std::vector<KacCheck> out;
  for (unsigned n = 1; n <= N; ++n) {
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] *= r.samples[i].a_t;
    const MeanEstimate e = jackknife_mean(pw);
    KacCheck k;
    k.n = n;
    k.t = cfg.horizon;
    k.mc_mean = e.mean;
    k.std_error = e.std_error;
    k.analytic = std::pow(cfg.horizon, n) * exact[n - 1];
    k.z = e.std_error > 0.0 ? (e.mean - k.analytic) / e.std_error : (e.mean == k.analytic ? 0.0 : INFINITY);
    out.push_back(k);
  }
  return out;
}

std::string samples_to_csv(const SimResult& r) {
  std::ostringstream os;
  os << "path_id,a_t,b_t,zero_time,terminal\n";
  for (const auto& s : r.samples)
    os << s.path << ',' << format_double(s.a_t) << ',' << format_double(s.b_t) << ',' << format_double(s.zero_time)
       << ',' << format_double(s.terminal) << '\n';
  return os.str();
}

}  // namespace occtime
