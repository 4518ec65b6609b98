#include <gtest/gtest.h>

#include <cmath>

#include "occtime/mgf.hpp"
#include "occtime/moments.hpp"

using namespace occtime;

namespace {

// Sticky BM solved by hand: v = lambda/(lambda+r) + A e^{-ax} on x > 0,
// lambda/(lambda+q) + B e^{bx} on x < 0, glued by the atom condition at 0.
double sticky_two_sided(double gamma, double lambda, double r, double q, bool atom_plus) {
  const double a = std::sqrt(2 * (lambda + r)), b = std::sqrt(2 * (lambda + q));
  const double rate0 = atom_plus ? lambda + r : lambda + q;
  return (a * lambda / (lambda + r) + b * lambda / (lambda + q) + 2 * gamma * lambda) / (a + b + 2 * gamma * rate0);
}

}  // namespace

TEST(Mgf, BesselClosedFormValue) {
  // mpmath at nu = -0.3, beta = 0.6, lambda = 1, r = 2.
  EXPECT_NEAR(mgf_bessel_closed(-0.3, 0.6, 1.0, 2.0).value, 0.54939185564179172381, 1e-15);
}

TEST(Mgf, QuadratureMatchesClosedFormProperty) {
  for (double nu : {-0.8, -0.3, -0.1})
    for (double beta : {0.2, 0.6})
      for (double r : {0.1, 3.0}) {
        const auto d = make_skew_bessel(nu, beta);
        EXPECT_NEAR(mgf_exp_time(*d, 1.2, r).value / mgf_bessel_closed(nu, beta, 1.2, r).value, 1.0, 1e-10)
            << nu << " " << beta << " " << r;
      }
}

TEST(Mgf, BrownianValue) {
  const double l = 0.8, r = 1.7;
  const double expect = std::sqrt(l / (l + r));
  EXPECT_NEAR(mgf_bessel_closed(-0.5, 0.5, l, r).value, expect, 1e-15);
  EXPECT_NEAR(mgf_exp_time(*make_skew_bm(0.5), l, r).value, expect, 1e-12);
}

TEST(Mgf, OscillatingEqualsEquivalentSkew) {
  const auto o = make_oscillating_bm(2.0, 1.0);
  EXPECT_NEAR(mgf_exp_time(*o, 1.0, 1.0).value, mgf_bessel_closed(-0.5, 1.0 / 3.0, 1.0, 1.0).value, 1e-11);
}

TEST(Mgf, StickyMatchesHandSolution) {
  const auto s = make_sticky_bm(1.0);
  EXPECT_NEAR(mgf_exp_time(*s, 1.5, 0.7).value, sticky_two_sided(1.0, 1.5, 0.7, 0.0, true), 1e-11);
  EXPECT_NEAR(mgf_exp_time(*s, 1.5, 0.7).value, 0.74878407174118, 1e-12);
  EXPECT_NEAR(mgf_two_sided(*s, 1.5, 0.7, 0.0, ZeroSide::minus).value, 0.902275811470221, 1e-12);
  for (auto side : {ZeroSide::plus, ZeroSide::minus})
    EXPECT_NEAR(mgf_two_sided(*s, 0.9, 0.4, 1.3, side).value,
                sticky_two_sided(1.0, 0.9, 0.4, 1.3, side == ZeroSide::plus), 1e-11);
}

TEST(Mgf, TwoSidedReductions) {
  const auto d = make_skew_bessel(-0.3, 0.6);
  EXPECT_NEAR(mgf_two_sided(*d, 1.0, 2.0, 0.0).value, mgf_bessel_closed(-0.3, 0.6, 1.0, 2.0).value, 1e-10);
  // Equal rates: the whole lifetime is charged, E e^{-r T} = lambda/(lambda + r).
  EXPECT_NEAR(mgf_two_sided(*d, 1.0, 0.6, 0.6).value, 1.0 / 1.6, 1e-10);
  // Continuous processes give no weight to the side the threshold belongs to.
  EXPECT_NEAR(mgf_two_sided(*d, 1.0, 0.6, 0.2, ZeroSide::plus).value,
              mgf_two_sided(*d, 1.0, 0.6, 0.2, ZeroSide::minus).value, 1e-9);
}

TEST(Mgf, StartingPointComposition) {
  // Strong Markov at H_0: E_x = lambda/(lambda+r) (1 - E_x e^{-(lambda+r)H_0}) + E_x e^{-(lambda+r)H_0} E_0.
  const auto d = make_skew_bm(0.5);
  const double l = 1.0, r = 0.5, x = 0.4;
  const double h = std::exp(-std::sqrt(2 * (l + r)) * x);
  const double expect = l / (l + r) * (1 - h) + h * mgf_exp_time(*d, l, r).value;
  EXPECT_NEAR(mgf_exp_time(*d, l, r, x).value, expect, 1e-11);
}

TEST(Mgf, DerivativesGiveMoments) {
  const auto d = make_skew_bessel(-0.3, 0.6);
  const auto m = bessel_closed_values(-0.3, 0.6, 3);
  for (const auto& c : mgf_moment_consistency(*d, 1.0, m)) EXPECT_LT(c.rel_error, 1e-5) << c.n;
}

TEST(Mgf, FornbergWeights) {
  const auto w = central_difference_weights(1, 2);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_NEAR(w[0], -0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  const auto w2 = central_difference_weights(2, 2);
  EXPECT_NEAR(w2[1], -2.0, 1e-15);
}

TEST(Mgf, Validation) {
  EXPECT_THROW(mgf_bessel_closed(-0.3, 0.6, 0.0, 1.0), ParameterError);
  EXPECT_THROW(mgf_exp_time(*make_skew_bm(0.5), 1.0, -1.0), ParameterError);
}
