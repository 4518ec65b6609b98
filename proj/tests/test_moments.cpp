#include <gtest/gtest.h>

#include <cmath>

#include "occtime/moments.hpp"

using namespace occtime;

TEST(Moments, ArcsineValues) {
  const MomentTable t = bm_moments(20);
  ASSERT_TRUE(t.exact());
  EXPECT_EQ(t.exact_values[0], BigRational(1, 2));
  EXPECT_EQ(t.exact_values[1], BigRational(3, 8));
  EXPECT_EQ(t.exact_values[2], BigRational(5, 16));
  BigRational p = 1;
  for (unsigned k = 1; k <= 20; ++k) {
    p *= BigRational(2 * k - 1, 2 * k);
    EXPECT_EQ(t.exact_values[k - 1], p) << k;
  }
}

TEST(Moments, SkewBmSpotValues) {
  EXPECT_NEAR(skew_bm_moment(0.7, 1), 0.7, 1e-15);
  // E A^2 = beta^2 + beta(1-beta)/2 for skew BM.
  EXPECT_NEAR(skew_bm_moment(0.7, 2), 0.49 + 0.105, 1e-15);
  EXPECT_EQ(skew_bm_moment(BigRational(1, 2), 5), arcsine_moment(5));
}

TEST(Moments, OscillatingEqualsSkewWithEquivalentBeta) {
  const MomentTable o = oscillating_moments(2.0, 1.0, 8);
  for (unsigned n = 1; n <= 8; ++n) EXPECT_NEAR(o[n], skew_bm_moment(1.0 / 3.0, n), 1e-14) << n;
}

TEST(Moments, SpiderWithTwoRaysIsSkewBm) {
  const MomentTable s = spider_moments(std::vector<double>{0.3, 0.7}, {2}, 6);
  for (unsigned n = 1; n <= 6; ++n) EXPECT_NEAR(s[n], skew_bm_moment(0.7, n), 1e-14);
}

TEST(Moments, BesselExactRationalTable) {
  // Exact recursion at nu = -1/3, beta = 1/4 computed with Python fractions.
  const BigRational expect[] = {{1, 4}, {3, 16}, {31, 192}, {1009, 6912}, {11221, 82944}, {126665, 995328}};
  const auto rec = bessel_recursive_values(BigRational(-1, 3), BigRational(1, 4), 6);
  const auto cf = bessel_closed_values(BigRational(-1, 3), BigRational(1, 4), 6);
  for (unsigned n = 0; n < 6; ++n) {
    EXPECT_EQ(rec[n], expect[n]) << n;
    EXPECT_EQ(cf[n], expect[n]) << n;
  }
}

TEST(Moments, BesselHalfOrderIsSkewBm) {
  for (int b = 1; b <= 9; ++b) {
    const BigRational beta(b, 10);
    const auto v = bessel_closed_values(BigRational(-1, 2), beta, 10);
    for (unsigned n = 1; n <= 10; ++n) EXPECT_EQ(v[n - 1], skew_bm_moment(beta, n)) << b << " " << n;
  }
}

TEST(Moments, RecursionAgreesWithClosedFormProperty) {
  for (double nu = -0.9; nu < -0.05; nu += 0.2)
    for (double beta = 0.1; beta < 0.95; beta += 0.2) {
      const auto r = bessel_recursive_values(nu, beta, 12);
      const auto c = bessel_closed_values(nu, beta, 12);
      for (unsigned n = 0; n < 12; ++n) EXPECT_NEAR(r[n] / c[n], 1.0, 1e-12) << nu << " " << beta << " " << n;
    }
}

TEST(Moments, MomentsAreCompletelyMonotone) {
  EXPECT_TRUE(hausdorff_moment_condition(bessel_moments_closed(BigRational(-3, 10), BigRational(3, 5), 20).exact_values));
  EXPECT_TRUE(hausdorff_moment_condition(bm_moments(30).exact_values));
  EXPECT_TRUE(hausdorff_moment_condition(skew_bm_moments(0.2, 15).values, 1e-12));
  EXPECT_FALSE(hausdorff_moment_condition(std::vector<double>{0.5, 0.5, 0.1}));
}

TEST(Moments, BesselFirstMomentIsBeta) {
  EXPECT_NEAR(bessel_closed_values(-0.3, 0.6, 1)[0], 0.6, 1e-15);
  EXPECT_NEAR(bessel_dk(-0.3, 0.6, 1), 0.6 * -0.3, 1e-15);
}

TEST(Moments, StickyLaplaceFirstMoment) {
  // U_1 = lambda^2 Bhat_1; for gamma = 1, lambda = 2 this is 1/4.
  EXPECT_NEAR(sticky_u(1.0, 2.0, 1), 0.25, 1e-15);
  EXPECT_NEAR(sticky_h(1.0, 2.0), 0.25, 1e-15);
  EXPECT_EQ(sticky_t(1), BigRational(1, 2));
  // gamma = 0 is plain Brownian motion: U_n = arcsine moment.
  for (unsigned n = 1; n <= 6; ++n) EXPECT_NEAR(sticky_u(0.0, 1.3, n), to_double(arcsine_moment(n)), 1e-13) << n;
}

TEST(Moments, GenericRecursionReproducesClosedForms) {
  // For a self-similar process U_n(lambda) = E_0(A_1^n).
  const auto d = make_skew_bessel(-0.3, 0.6);
  const auto g = generic_laplace_moments(*d, 1.7, 6);
  const auto c = bessel_closed_values(-0.3, 0.6, 6);
  for (unsigned n = 1; n <= 6; ++n) EXPECT_NEAR(g.table[n], c[n - 1], 1e-9) << n;
  for (unsigned k = 1; k <= 5; ++k) EXPECT_NEAR(g.dk[k - 1], bessel_dk(-0.3, 0.6, k), 1e-9) << k;
}

TEST(Moments, GenericStickyMatchesAnalytic) {
  const auto d = make_sticky_bm(1.0);
  const auto g = generic_laplace_moments(*d, 0.8, 5, false);
  for (unsigned n = 1; n <= 5; ++n) EXPECT_NEAR(g.table[n], sticky_u(1.0, 0.8, n), 1e-9) << n;
}

TEST(Moments, DegenerateAndLimits) {
  EXPECT_THROW(bm_moments(kMaxMomentOrder + 1), ParameterError);
  EXPECT_THROW(bessel_moments_closed(-0.3, 0.6, 0), ParameterError);
  const MomentTable t = skew_bm_moments(BigRational(1), 4);
  EXPECT_TRUE(t.degenerate);
  for (unsigned n = 1; n <= 4; ++n) EXPECT_EQ(t[n], 1.0);
}

TEST(Moments, Serialisation) {
  const MomentTable t = bm_moments(3);
  const std::string csv = t.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,value,method");
  EXPECT_NE(csv.find("\n3,5/16,"), std::string::npos);
  EXPECT_NE(t.to_json().find("\"5/16\""), std::string::npos);
}
