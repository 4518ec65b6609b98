#pragma once

// Path simulation of occupation times. Every scheme runs a lattice kernel
// from simd.hpp; paths are split over a worker pool, and each path owns a
// random stream derived from (seed, path index), so results do not depend on
// the worker count or on the SIMD level.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "occtime/diffusion.hpp"
#include "occtime/moments.hpp"
#include "occtime/simd.hpp"

namespace occtime {

enum class Scheme { skew_walk, chain_approx, sticky_walk };

std::string to_string(Scheme s);

struct SimConfig {
  /// "bm", "skew-bm", "bessel", "oscillating", "sticky" or "spider".
  std::string diffusion = "bm";
  ParamMap params;
  /// Spider only: ray probabilities and the 1-based rays counted by A.
  std::vector<double> spider_p;
  std::set<unsigned> spider_rays;
  double horizon = 1.0;
  /// Walk schemes: time step (spatial step sqrt(step)). Bessel chain: the
  /// grid spacing away from 0 is sqrt(step).
  double step = 1e-4;
  std::uint64_t paths = 100000;
  std::uint64_t seed = 1;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;

  /// Throws ParameterError on invalid settings.
  void validate() const;
};

struct OccupationSample {
  std::uint64_t path = 0;
  double a_t = 0.0;        // time in [0, inf)
  double b_t = 0.0;        // time in (0, inf)
  double zero_time = 0.0;  // a_t - b_t
  double terminal = 0.0;
};

struct SimResult {
  SimConfig config;
  Scheme scheme = Scheme::skew_walk;
  SimdLevel simd = SimdLevel::scalar;
  std::vector<OccupationSample> samples;
  /// Time step actually used (horizon / slots for walks, the hold at the
  /// origin for the Bessel chain).
  double effective_step = 0.0;
  /// Spatial lattice spacing (walks) or the uniform outer spacing (Bessel chain).
  double spatial_step = 0.0;
  /// Skewness at 0 driving the walk, where one applies.
  double walk_beta = 0.5;
  std::string bias_note;
};

SimResult simulate(const SimConfig& cfg);

SimResult simulate_skew_bm(const SimConfig& cfg);
SimResult simulate_bessel(const SimConfig& cfg);
SimResult simulate_oscillating(const SimConfig& cfg);
SimResult simulate_sticky(const SimConfig& cfg);
SimResult simulate_spider(const SimConfig& cfg);

/// Sample moments of (A_t / t)^n, n = 1..N, with jackknife standard errors.
MomentTable estimate_moments(const SimResult& r, unsigned N);
/// Same for the B functional (time strictly above 0).
MomentTable estimate_moments_b(const SimResult& r, unsigned N);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean with its delete-one jackknife standard error.
MeanEstimate jackknife_mean(const std::vector<double>& x);

struct KacCheck {
  unsigned n = 0;
  double t = 0.0;
  double mc_mean = 0.0;    // mean of A_t^n
  double std_error = 0.0;
  double analytic = 0.0;   // t^n E_0(A_1^n)
  double z = 0.0;          // (mc_mean - analytic) / std_error
};

/// Monte Carlo E_0(A_t^n), n = 1..N, against t^n E_0(A_1^n) from the moment
/// closed forms; only for self-similar built-in diffusions.
std::vector<KacCheck> kac_raw_moment_mc_check(const SimConfig& cfg, unsigned N);

/// Analytic E_0(A_1^n), n = 1..N, for the diffusion named in cfg.
std::vector<double> analytic_moments(const SimConfig& cfg, unsigned N);

/// Header "path_id,a_t,b_t,zero_time,terminal".
std::string samples_to_csv(const SimResult& r);

}  // namespace occtime
