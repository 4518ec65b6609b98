#include <gtest/gtest.h>

#include <cmath>

#include "occtime/densities.hpp"
#include "occtime/moments.hpp"

using namespace occtime;

TEST(Densities, LampertiPdfValues) {
  struct Ref {
    double nu, x, pdf;
  };
  // mpmath, beta = 0.6.
  const Ref refs[] = {{-0.3, 0.001, 19.5716643647029101}, {-0.3, 0.25, 0.367164778344231512},
                      {-0.3, 0.5, 0.308198484075629655},  {-0.3, 0.9, 0.883044408972828399},
                      {-0.1, 0.001, 18.8304000276859634}, {-0.1, 0.5, 0.0967004080622102304},
                      {-0.8, 0.25, 0.439364676253179564}, {-0.8, 0.5, 1.36410290009091115}};
  for (const auto& r : refs) EXPECT_NEAR(lamperti_pdf(r.nu, 0.6, r.x) / r.pdf, 1.0, 1e-13) << r.nu << " " << r.x;
}

TEST(Densities, LampertiCdfValues) {
  struct Ref {
    double nu, x, cdf;
  };
  // mpmath quadrature of the density after x = u^{1/|nu|}, beta = 0.6.
  const Ref refs[] = {{-0.1, 1e-6, 0.14199434955809473}, {-0.1, 0.01, 0.29489281862765377},
                      {-0.1, 0.3, 0.37890804041065335},  {-0.1, 0.7, 0.41985308771364336},
                      {-0.1, 0.99, 0.51362055799573019}, {-0.3, 1e-6, 0.0090135545207127553},
                      {-0.3, 0.01, 0.13056148098627996}, {-0.3, 0.3, 0.32937045760810565},
                      {-0.3, 0.7, 0.45920631845436115},  {-0.3, 0.99, 0.73989779383122911}};
  for (const auto& r : refs) {
    const LampertiCdf F(r.nu, 0.6);
    EXPECT_NEAR(F(r.x), r.cdf, 1e-10) << r.nu << " " << r.x;
  }
}

TEST(Densities, HalfOrderLampertiIsSkewBm) {
  for (double beta : {0.2, 0.5, 0.75})
    for (double x : {0.01, 0.3, 0.77}) EXPECT_NEAR(lamperti_pdf(-0.5, beta, x) / skew_bm_pdf(beta, x), 1.0, 1e-13);
  EXPECT_NEAR(skew_bm_pdf(0.5, 0.3), arcsine_pdf(0.3), 1e-15);
  EXPECT_NEAR(arcsine_cdf(0.5), 0.5, 1e-15);
  EXPECT_NEAR(arcsine_cdf(0.25), 1.0 / 3.0, 1e-15);
}

TEST(Densities, CdfIsMonotoneAndBounded) {
  const auto d = OccupationDensity::lamperti(-0.3, 0.6);
  std::vector<double> xs;
  for (int i = 0; i <= 1000; ++i) xs.push_back(i / 1000.0);
  const auto v = d.cdf(xs);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_NEAR(v.back(), 1.0, 1e-14);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GE(v[i], v[i - 1]) << xs[i];
  EXPECT_EQ(d.cdf(-0.5), 0.0);
  EXPECT_EQ(d.cdf(1.5), 1.0);
}

TEST(Densities, BatchCdfMatchesPointwise) {
  const LampertiCdf F(-0.7, 0.3);
  std::vector<double> xs;
  for (int i = 1; i < 200; ++i) xs.push_back(std::pow(i / 200.0, 3));
  const auto v = F.evaluate(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(v[i], F(xs[i]), 1e-14);
}

TEST(Densities, CdfDerivativeIsPdf) {
  const LampertiCdf F(-0.3, 0.6);
  for (double x : {0.05, 0.4, 0.6, 0.93}) {
    const double h = 1e-5;
    EXPECT_NEAR((F(x + h) - F(x - h)) / (2 * h) / lamperti_pdf(-0.3, 0.6, x), 1.0, 1e-6) << x;
  }
}

TEST(Densities, MomentOracleMatchesClosedForm) {
  for (double nu : {-0.1, -0.3, -0.8})
    for (double beta : {0.25, 0.6}) {
      const auto d = OccupationDensity::lamperti(nu, beta);
      EXPECT_NEAR(density_moment_oracle(d, 0), 1.0, 1e-10);
      const auto c = bessel_closed_values(nu, beta, 6);
      for (unsigned n = 1; n <= 6; ++n) EXPECT_NEAR(density_moment_oracle(d, n), c[n - 1], 1e-9) << nu << " " << n;
    }
}

TEST(Densities, OccupationLawDispatch) {
  EXPECT_EQ(occupation_law(*make_skew_bessel(-0.3, 0.6)).family(), DensityFamily::lamperti);
  EXPECT_EQ(occupation_law(*make_skew_bm(0.3)).family(), DensityFamily::skew_bm);
  const auto o = occupation_law(*make_oscillating_bm(2, 1));
  EXPECT_NEAR(o.beta(), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(occupation_law(*make_sticky_bm(1.0)), ParameterError);
  EXPECT_THROW(OccupationDensity::arcsine().pdf(1.0), ParameterError);
}
