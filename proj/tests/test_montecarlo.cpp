#include <gtest/gtest.h>

#include <cmath>

#include "occtime/ks.hpp"
#include "occtime/montecarlo.hpp"
#include "occtime/rng.hpp"

using namespace occtime;

namespace {

SimConfig config(const std::string& name, ParamMap params, std::uint64_t paths, double step) {
  SimConfig c;
  c.diffusion = name;
  c.params = std::move(params);
  c.paths = paths;
  c.step = step;
  c.seed = 7;
  c.workers = 1;
  return c;
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Xoshiro128ss a(5, 0), b(5, 0), c(5, 1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(Xoshiro128ss(5, 0).next(), c.next());
  EXPECT_EQ(probability_threshold31(0.0), -1);
  EXPECT_EQ(probability_threshold31(1.0), 0x7fffffff);
  EXPECT_EQ(probability_threshold31(0.5), (1 << 30) - 1);
}

TEST(Rng, UniformMeanAndVariance) {
  Xoshiro128ss g(11, 3);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.003);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
}

TEST(Ks, KolmogorovSurvival) {
  // mpmath sum of 2 sum_k (-1)^{k-1} exp(-2 k^2 x^2).
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.04948587675537791, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(1.63), 0.0098463648884865244, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.96394524366487509, 1e-13);
  EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-15);
}

TEST(Ks, DetectsWrongLaw) {
  std::vector<double> x;
  for (int i = 0; i < 2000; ++i) x.push_back((i + 0.5) / 2000.0);
  EXPECT_LT(ks_test(x, OccupationDensity::arcsine()).p_value, 1e-6);
  std::vector<double> y;
  for (int i = 0; i < 2000; ++i) y.push_back(std::pow(std::sin(M_PI / 2 * (i + 0.5) / 2000.0), 2));
  EXPECT_GT(ks_test(y, OccupationDensity::arcsine()).p_value, 0.99);
}

TEST(MonteCarlo, BrownianArcsineLaw) {
  const SimResult r = simulate(config("bm", {}, 20000, 1e-4));
  ASSERT_EQ(r.samples.size(), 20000u);
  const auto m = estimate_moments(r, 2);
  EXPECT_LT(std::fabs(m[1] - 0.5) / m.std_errors[0], 4.0);
  EXPECT_LT(std::fabs(m[2] - 0.375) / m.std_errors[1], 4.0);
  std::vector<double> a;
  for (const auto& s : r.samples) a.push_back(s.a_t);
  EXPECT_GT(ks_test(a, OccupationDensity::arcsine(), r.effective_step).p_value, 0.01);
}

TEST(MonteCarlo, SkewMeanIsBeta) {
  const auto checks = kac_raw_moment_mc_check(config("skew-bm", {{"beta", 0.7}}, 20000, 1e-3), 2);
  for (const auto& c : checks) EXPECT_LT(std::fabs(c.z), 4.0) << c.n;
}

TEST(MonteCarlo, OscillatingAndSpider) {
  for (const auto& c : kac_raw_moment_mc_check(config("oscillating", {{"sigma_plus", 2}, {"sigma_minus", 1}}, 10000, 1e-3), 2))
    EXPECT_LT(std::fabs(c.z), 4.0) << c.n;
  SimConfig s = config("spider", {}, 10000, 1e-3);
  s.spider_p = {0.2, 0.5, 0.3};
  s.spider_rays = {2, 3};
  for (const auto& c : kac_raw_moment_mc_check(s, 2)) EXPECT_LT(std::fabs(c.z), 4.0) << c.n;
}

TEST(MonteCarlo, BesselChainMoments) {
  const auto checks = kac_raw_moment_mc_check(config("bessel", {{"nu", -0.3}, {"beta", 0.6}}, 2000, 1e-3), 2);
  for (const auto& c : checks) EXPECT_LT(std::fabs(c.z), 4.0) << c.n;
}

TEST(MonteCarlo, StickyZeroTime) {
  SimConfig c = config("sticky", {{"gamma", 1.0}}, 5000, 1e-3);
  const SimResult r = simulate(c);
  double zero = 0;
  for (const auto& s : r.samples) {
    EXPECT_NEAR(s.a_t - s.b_t, s.zero_time, 1e-12);
    EXPECT_GE(s.zero_time, 0.0);
    zero += s.zero_time;
  }
  // E(B_1) = 0.26700671898698201 at gamma = 1 (Talbot inversion); A_1 adds the zero time.
  const auto b = estimate_moments_b(r, 1);
  EXPECT_LT(std::fabs(b[1] - 0.26700671898698201) / b.std_errors[0], 4.0);
  EXPECT_GT(zero / r.samples.size(), 0.1);
}

TEST(MonteCarlo, WorkerCountDoesNotChangeSamples) {
  for (const std::string name : {"bm", "bessel", "sticky"}) {
    ParamMap p;
    if (name == "bessel") p = {{"nu", -0.5}, {"beta", 0.4}};
    if (name == "sticky") p = {{"gamma", 0.5}};
    SimConfig c = config(name, p, 300, 1e-3);
    const SimResult one = simulate(c);
    c.workers = 3;
    const SimResult three = simulate(c);
    ASSERT_EQ(one.samples.size(), three.samples.size());
    for (std::size_t i = 0; i < one.samples.size(); ++i) {
      EXPECT_EQ(one.samples[i].a_t, three.samples[i].a_t) << name << " " << i;
      EXPECT_EQ(one.samples[i].terminal, three.samples[i].terminal);
    }
  }
}

TEST(MonteCarlo, SeedChangesSamples) {
  SimConfig c = config("bm", {}, 100, 1e-3);
  const SimResult a = simulate(c);
  c.seed = 8;
  const SimResult b = simulate(c);
  int same = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) same += a.samples[i].a_t == b.samples[i].a_t;
  EXPECT_LT(same, 20);
}

TEST(MonteCarlo, JackknifeOfMeanIsStandardError) {
  const std::vector<double> x{1, 2, 3, 4, 6};
  const auto e = jackknife_mean(x);
  EXPECT_DOUBLE_EQ(e.mean, 3.2);
  // For the mean the jackknife equals s / sqrt(n).
  double s2 = 0;
  for (double v : x) s2 += (v - 3.2) * (v - 3.2);
  EXPECT_NEAR(e.std_error, std::sqrt(s2 / 4 / 5), 1e-14);
}

TEST(MonteCarlo, CsvAndValidation) {
  SimConfig c = config("bm", {}, 3, 1e-2);
  const std::string csv = samples_to_csv(simulate(c));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "path_id,a_t,b_t,zero_time,terminal");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  c.paths = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = config("bm", {}, 3, -1.0);
  EXPECT_THROW(c.validate(), ParameterError);
  c = config("warp", {}, 3, 1e-2);
  EXPECT_THROW(simulate(c), ParameterError);
}
