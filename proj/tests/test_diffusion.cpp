#include <gtest/gtest.h>

#include <cmath>

#include "occtime/diffusion.hpp"

using namespace occtime;

namespace {

std::vector<DiffusionPtr> builtins() {
  return {make_skew_bessel(-0.3, 0.6), make_skew_bessel(-0.7, 0.2), make_skew_bm(0.5), make_skew_bm(0.8),
          make_oscillating_bm(2.0, 1.0), make_sticky_bm(1.0), make_sticky_bm(0.0)};
}

}  // namespace

TEST(Diffusion, WronskianMatchesScaleDerivatives) {
  for (const auto& d : builtins())
    for (double lambda : {0.3, 1.0, 4.0})
      for (double x : {-1.3, -0.2, 0.4, 2.0}) {
        const double w = d->psi_scale_deriv(lambda, x, Side::right) * d->phi(lambda, x) -
                         d->psi(lambda, x) * d->phi_scale_deriv(lambda, x, Side::right);
        EXPECT_NEAR(w / d->wronskian(lambda), 1.0, 1e-9) << d->name() << " lambda=" << lambda << " x=" << x;
      }
}

TEST(Diffusion, GreenKernelIsSymmetric) {
  for (const auto& d : builtins())
    for (double x : {-0.8, 0.0, 0.5})
      for (double y : {-0.3, 0.9}) {
        EXPECT_NEAR(d->green(1.1, x, y), d->green(1.1, y, x), 1e-14 * std::fabs(d->green(1.1, x, y)));
        EXPECT_GT(d->green(1.1, x, y), 0.0);
      }
}

TEST(Diffusion, ResolventOfOneIsOneOverLambda) {
  // int G_lambda(0, y) m(dy) = 1/lambda for a conservative process.
  for (const auto& d : builtins())
    for (double lambda : {0.5, 2.0}) {
      const auto one = [](double) { return 1.0; };
      const double total =
          integrate_against_green(*d, lambda, one, true) + integrate_against_green(*d, lambda, one, false);
      EXPECT_NEAR(total * lambda, 1.0, 1e-9) << d->name();
    }
}

TEST(Diffusion, BesselHittingDerivativesMatchHighPrecision) {
  // mpmath d^k/dlambda^k of 2^{nu+1}/Gamma(-nu) z^{-nu} K_nu(z), z = x sqrt(2 lambda).
  const double ref[] = {0.20381605926363840947, -0.10090419335956559206, 0.092744515285605634435,
                        -0.140297848737402422,  0.3088666137199691691,   -0.90552264900349963004};
  for (unsigned k = 0; k < 6; ++k)
    EXPECT_NEAR(bessel_hitting_deriv(-0.3, 0.7, 1.3, k) / ref[k], 1.0, 1e-12) << k;
  const auto d = make_skew_bessel(-0.3, 0.6);
  EXPECT_NEAR(d->hitting_transform_deriv(-0.7, 1.3, 3) / ref[3], 1.0, 1e-12);
}

TEST(Diffusion, BrownianHittingDerivatives) {
  // E_x e^{-lambda H} = e^{-x sqrt(2 lambda)}; first derivative is -x/sqrt(2 lambda) e^{...}.
  const auto d = make_skew_bm(0.3);
  const double x = 0.6, lambda = 0.9, a = std::sqrt(2 * lambda);
  EXPECT_NEAR(d->hitting_transform(x, lambda), std::exp(-a * x), 1e-15);
  EXPECT_NEAR(d->hitting_transform_deriv(x, lambda, 1), -x / a * std::exp(-a * x), 1e-14);
  EXPECT_NEAR(d->hitting_transform_deriv(x, lambda, 2), (x * x / (a * a) + x / (a * a * a)) * std::exp(-a * x),
              1e-14);
}

TEST(Diffusion, HittingDerivativesMatchFiniteDifferences) {
  for (const auto& d : builtins()) {
    const double x = 0.45, lambda = 1.2, h = 1e-4;
    for (unsigned k = 1; k <= 3; ++k) {
      const double fd = (d->hitting_transform_deriv(x, lambda + h, k - 1) -
                         d->hitting_transform_deriv(x, lambda - h, k - 1)) / (2 * h);
      EXPECT_NEAR(fd / d->hitting_transform_deriv(x, lambda, k), 1.0, 1e-6) << d->name() << " k=" << k;
    }
  }
}

TEST(Diffusion, ScaleAndSpeedShapes) {
  const auto b = make_skew_bessel(-0.3, 0.6);
  EXPECT_EQ(b->scale(0.0), 0.0);
  EXPECT_GT(b->scale(1.0), 0.0);
  EXPECT_LT(b->scale(-1.0), 0.0);
  const auto s = make_sticky_bm(1.5);
  EXPECT_DOUBLE_EQ(s->speed_atom_at_0(), 3.0);
  EXPECT_FALSE(s->self_similar());
  EXPECT_TRUE(make_oscillating_bm(2, 1)->self_similar());
  EXPECT_NEAR(make_oscillating_bm(2, 1)->equivalent_beta(), 1.0 / 3.0, 1e-15);
}

TEST(Diffusion, FactoryAndValidation) {
  EXPECT_EQ(make_diffusion("bm", {})->name(), "skew-bm");
  EXPECT_EQ(make_diffusion("bessel", {{"nu", -0.5}, {"beta", 0.5}})->name(), "bessel");
  EXPECT_THROW(make_skew_bessel(0.2, 0.5), ParameterError);
  EXPECT_THROW(make_skew_bessel(-0.5, 1.5), ParameterError);
  EXPECT_THROW(make_skew_bm(0.0), ParameterError);
  EXPECT_THROW(make_oscillating_bm(-1.0, 1.0), ParameterError);
  EXPECT_THROW(make_sticky_bm(-0.1), ParameterError);
  EXPECT_THROW(make_diffusion("nope", {}), ParameterError);
  EXPECT_THROW(make_skew_bm(0.5)->psi(-1.0, 0.0), ParameterError);
}

TEST(Diffusion, UserDiffusionReproducesBrownianMotion) {
  UserDiffusionFunctions f;
  f.speed_density = [](double) { return 2.0; };
  f.scale = [](double x) { return x; };
  f.psi = [](double l, double x) { return std::exp(std::sqrt(2 * l) * x); };
  f.phi = [](double l, double x) { return std::exp(-std::sqrt(2 * l) * x); };
  f.wronskian = [](double l) { return 2 * std::sqrt(2 * l); };
  f.self_similar = true;
  const UserDiffusion u(f);
  const auto bm = make_skew_bm(0.5);
  for (double x : {-0.5, 0.0, 1.0})
    EXPECT_NEAR(u.green(0.7, 0.2, x), bm->green(0.7, 0.2, x), 1e-15);
  EXPECT_NEAR(u.psi_scale_deriv(0.7, 0.3, Side::left), bm->psi_scale_deriv(0.7, 0.3, Side::left), 1e-6);
}
