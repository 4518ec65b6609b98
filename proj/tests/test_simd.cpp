#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "occtime/montecarlo.hpp"
#include "occtime/rng.hpp"
#include "occtime/simd.hpp"

using namespace occtime;

#define REQUIRE_AVX2() \
  if (!avx2_available()) GTEST_SKIP() << "AVX2 not available"

TEST(Simd, ClenshawEquivalence) {
  REQUIRE_AVX2();
  std::vector<double> coef{0.3, -1.2, 0.05, 0.7, -0.01, 2e-4, 1e-5};
  std::vector<double> t;
  for (int i = 0; i < 1003; ++i) t.push_back(std::cos(0.37 * i));
  std::vector<double> a(t.size()), b(t.size());
  clenshaw_batch_scalar(coef.data(), coef.size(), t.data(), a.data(), t.size());
  clenshaw_batch_avx2(coef.data(), coef.size(), t.data(), b.data(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(a[i], b[i]) << i;
}

TEST(Simd, ClenshawMatchesChebyshevDefinition) {
  std::vector<double> coef{1.0, 0.5, -0.25, 0.125};
  std::vector<double> t{-1.0, -0.3, 0.0, 0.8, 1.0};
  std::vector<double> out(t.size());
  clenshaw_batch(coef.data(), coef.size(), t.data(), out.data(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double th = std::acos(t[i]);
    double ref = 0;
    for (std::size_t k = 0; k < coef.size(); ++k) ref += coef[k] * std::cos(k * th);
    EXPECT_NEAR(out[i], ref, 1e-14);
  }
}

TEST(Simd, LatticeWalkEquivalence) {
  REQUIRE_AVX2();
  for (double hold : {0.0, 0.4}) {
    LatticeWalkParams p;
    p.slots = 500;
    p.hold_at_zero = probability_threshold31(hold);
    p.up_at_zero = probability_threshold31(hold + (1 - hold) * 0.7);
    const std::size_t n = 1029;
    std::vector<LatticeWalkResult> a(n), b(n);
    lattice_walk_scalar(p, 99, 17, n, a.data());
    lattice_walk_avx2(p, 99, 17, n, b.data());
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(a[i].positive_slots, b[i].positive_slots) << i;
      EXPECT_EQ(a[i].zero_slots, b[i].zero_slots) << i;
      EXPECT_EQ(a[i].terminal, b[i].terminal) << i;
    }
  }
}

TEST(Simd, ChainWalkEquivalence) {
  REQUIRE_AVX2();
  // Small inhomogeneous chain: holds and jump probabilities vary by site.
  const std::int32_t m = 40;
  std::vector<double> hold(2 * m + 1), frac(2 * m + 1);
  std::vector<std::int32_t> up(2 * m + 1);
  for (std::int32_t s = -m; s <= m; ++s) {
    hold[s + m] = 1e-3 * (1.0 + 0.5 * std::sin(0.3 * s));
    frac[s + m] = s > 0 ? 1.0 : s < 0 ? 0.0 : 0.6;
    up[s + m] = probability_threshold31(0.5 + 0.1 * std::cos(0.7 * s));
  }
  up[0] = 0x7fffffff;
  up[2 * m] = -1;
  ChainWalkParams p{0.5, m, hold.data(), frac.data(), up.data()};
  const std::size_t n = 517;
  std::vector<ChainWalkResult> a(n), b(n);
  chain_walk_scalar(p, 3, 0, n, a.data());
  chain_walk_avx2(p, 3, 0, n, b.data());
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(a[i].occupation, b[i].occupation) << i;
    EXPECT_EQ(a[i].terminal, b[i].terminal) << i;
    EXPECT_EQ(a[i].jumps, b[i].jumps) << i;
  }
}

TEST(Simd, SimulationIdenticalAcrossLevels) {
  REQUIRE_AVX2();
  for (const std::string name : {"skew-bm", "bessel", "sticky"}) {
    SimConfig c;
    c.diffusion = name;
    c.params = name == "skew-bm" ? ParamMap{{"beta", 0.3}}
               : name == "bessel" ? ParamMap{{"nu", -0.7}, {"beta", 0.6}}
                                  : ParamMap{{"gamma", 0.5}};
    c.paths = 400;
    c.step = 1e-3;
    c.workers = 1;
    set_simd_override(SimdLevel::scalar);
    const SimResult s = simulate(c);
    set_simd_override(SimdLevel::avx2);
    const SimResult v = simulate(c);
    set_simd_override(std::nullopt);
    EXPECT_EQ(s.simd, SimdLevel::scalar);
    EXPECT_EQ(v.simd, SimdLevel::avx2);
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      EXPECT_EQ(s.samples[i].a_t, v.samples[i].a_t) << name << " " << i;
      EXPECT_EQ(s.samples[i].b_t, v.samples[i].b_t);
      EXPECT_EQ(s.samples[i].terminal, v.samples[i].terminal);
    }
  }
}

TEST(Simd, OverrideAndNames) {
  EXPECT_EQ(to_string(SimdLevel::scalar), "scalar");
  EXPECT_EQ(to_string(SimdLevel::avx2), "avx2");
  set_simd_override(SimdLevel::scalar);
  EXPECT_EQ(active_simd_level(), SimdLevel::scalar);
  set_simd_override(std::nullopt);
  EXPECT_EQ(active_simd_level(), avx2_available() ? SimdLevel::avx2 : SimdLevel::scalar);
}
