#include "occtime/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "occtime/quadrature.hpp"
#include "occtime/special_fn.hpp"

namespace occtime {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be a positive finite number");
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw ParameterError(std::string(name) + " must lie in (0, 1)");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive");
}

// Derivative at s0 of the quadratic through (s0,u0), (s1,u1), (s2,u2).
double quadratic_slope_at_first(double s0, double u0, double s1, double u1, double s2, double u2) {
  const double d1 = s1 - s0;
  const double d2 = s2 - s0;
  return (u1 * d2 * d2 - u2 * d1 * d1 - u0 * (d2 * d2 - d1 * d1)) / (d1 * d2 * (d2 - d1));
}

double scale_deriv_fd(const Diffusion& d, double x, Side side, const std::function<double(double)>& u) {
  const double h = 1e-5 * std::max(1.0, std::abs(x)) * (side == Side::right ? 1.0 : -1.0);
  const double s0 = d.scale(x), s1 = d.scale(x + h), s2 = d.scale(x + 2 * h);
  return quadratic_slope_at_first(s0, u(x), s1, u(x + h), s2, u(x + 2 * h));
}

// f^{(k)} of e^{-c sqrt(2 lambda)}, c >= 0. This is the nu = -1/2 member of
// the Bessel family, since 2^{1/2}/Gamma(1/2) z^{1/2} K_{1/2}(z) = e^{-z}.
double exp_hitting_deriv(double c, double lambda, unsigned k) {
  if (k == 0) return std::exp(-c * std::sqrt(2.0 * lambda));
  if (c == 0.0) return 0.0;
  return bessel_hitting_deriv(-0.5, c, lambda, k);
}

void check_order(unsigned k, unsigned max_k) {
  if (k > max_k) throw ParameterError("hitting-transform derivative order " + std::to_string(k) + " exceeds " +
                                      std::to_string(max_k));
}

}  // namespace

// ---------------------------------------------------------------------------
// Diffusion defaults

double Diffusion::psi_scale_deriv(double lambda, double x, Side side) const {
  return scale_deriv_fd(*this, x, side, [&](double y) { return psi(lambda, y); });
}

double Diffusion::phi_scale_deriv(double lambda, double x, Side side) const {
  return scale_deriv_fd(*this, x, side, [&](double y) { return phi(lambda, y); });
}

double Diffusion::hitting_transform(double x, double lambda) const {
  require_lambda(lambda);
  if (x >= 0.0) return phi(lambda, x) / phi(lambda, 0.0);
  return psi(lambda, x) / psi(lambda, 0.0);
}

double Diffusion::hitting_transform_deriv(double x, double lambda, unsigned k) const {
  if (k == 0) return hitting_transform(x, lambda);
  throw ParameterError(name() + ": no hitting-transform derivatives available");
}

double Diffusion::length_scale(double lambda) const { return 1.0 / std::sqrt(2.0 * lambda); }

double Diffusion::green(double lambda, double x, double y) const {
  require_lambda(lambda);
  const double lo = std::min(x, y), hi = std::max(x, y);
  return psi(lambda, lo) * phi(lambda, hi) / wronskian(lambda);
}

// ---------------------------------------------------------------------------
// Bessel-family hitting transform expansion

const std::vector<std::vector<double>>& bessel_hitting_coefficients() {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> a(kMaxHittingDerivative + 1);
    for (unsigned k = 1; k <= kMaxHittingDerivative; ++k) {
      a[k].assign(k + 1, 0.0);
      for (unsigned j = 1; j <= k; ++j) {
        BigRational sum = 0;
        for (unsigned i = j; i <= std::min(k, 2 * j); ++i) {
          BigRational term(BigInt(factorial(2 * k - 1 - i) * i),
                           BigInt(factorial(k - i) * factorial(i - j) * factorial(2 * j - i)));
          term /= BigRational(BigInt(1) << (2 * k - j));
          if ((k + i - j) % 2 == 1) term = -term;
          sum += term;
        }
        a[k][j] = to_double(sum);
      }
    }
    return a;
  }();
  return table;
}

double bessel_hitting_deriv(double nu, double x, double lambda, unsigned k) {
  require_lambda(lambda);
  check_order(k, kMaxHittingDerivative);
  const double ax = std::abs(x);
  const double z = ax * std::sqrt(2.0 * lambda);
  const double norm = std::pow(2.0, nu + 1.0) / std::tgamma(-nu);
  // Below kBesselMinX the limits at the origin are exact to double precision.
  if (k == 0) {
    if (z < kBesselMinX) return 1.0;
    return norm * std::pow(z, -nu) * bessel_k(nu, z);
  }
  if (z < kBesselMinX) return 0.0;
  std::vector<double> q(k + 1);
  scaled_bessel_k_sequence(nu, z, q);
  const auto& a = bessel_hitting_coefficients()[k];
  double s = 0.0;
  for (unsigned j = 1; j <= k; ++j) s += a[j] * q[j];
  return norm / std::pow(lambda, k) * std::pow(z, -nu) * s;
}

// ---------------------------------------------------------------------------
// Skew Bessel

SkewBessel::SkewBessel(double nu, double beta) : nu_(nu), beta_(beta) {
  if (!(nu > -1.0 && nu < 0.0)) throw ParameterError("nu must lie in (-1, 0)");
  require_open_unit(beta, "beta");
  sin_term_ = std::sin(-std::numbers::pi * nu);
}

double SkewBessel::speed_density(double x) const {
  const double w = x > 0.0 ? 4.0 * beta_ : 4.0 * (1.0 - beta_);
  return w * std::pow(std::abs(x), 2.0 * nu_ + 1.0);
}

double SkewBessel::scale(double x) const {
  if (x >= 0.0) return -std::pow(x, -2.0 * nu_) / (4.0 * beta_ * nu_);
  return std::pow(-x, -2.0 * nu_) / (4.0 * (1.0 - beta_) * nu_);
}

double SkewBessel::psi_hat(double lambda, double x) const {
  const double a = std::sqrt(2.0 * lambda);
  if (a * x < kBesselMinX) return std::pow(a / 2.0, nu_) / std::tgamma(1.0 + nu_);
  return std::pow(x, -nu_) * bessel_i(nu_, a * x);
}

double SkewBessel::phi_hat(double lambda, double x) const {
  const double a = std::sqrt(2.0 * lambda);
  if (a * x < kBesselMinX) return std::pow(a / 2.0, nu_) * std::tgamma(-nu_) / 2.0;
  return std::pow(x, -nu_) * bessel_k(nu_, a * x);
}

double SkewBessel::psi(double lambda, double x) const {
  require_lambda(lambda);
  if (x <= 0.0) return phi_hat(lambda, -x);
  return std::numbers::pi / (2.0 * beta_ * sin_term_) * psi_hat(lambda, x) -
         (1.0 - beta_) / beta_ * phi_hat(lambda, x);
}

double SkewBessel::phi(double lambda, double x) const {
  require_lambda(lambda);
  if (x >= 0.0) return phi_hat(lambda, x);
  return std::numbers::pi / (2.0 * (1.0 - beta_) * sin_term_) * psi_hat(lambda, -x) -
         beta_ / (1.0 - beta_) * phi_hat(lambda, -x);
}

double SkewBessel::wronskian(double lambda) const {
  require_lambda(lambda);
  return std::numbers::pi / sin_term_;
}

// With r = |x| and a = sqrt(2 lambda): dS/dx = r^{-2nu-1} / (2 beta_side), so
// d/dS (r^{-nu} I_nu(a r)) = 2 beta_side a r^{nu+1} I_{nu+1}(a r) and the K
// analogue carries a minus sign. a r^{nu+1} K_{nu+1}(a r) -> Gamma(nu+1) (a/2)^{-nu}.
double SkewBessel::psi_scale_deriv(double lambda, double x, Side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  const double r = std::abs(x);
  const double kterm = a * r < kBesselMinX ? std::tgamma(nu_ + 1.0) * std::pow(a / 2.0, -nu_)
                                : a * std::pow(r, nu_ + 1.0) * bessel_k(nu_ + 1.0, a * r);
  if (x <= 0.0) return 2.0 * (1.0 - beta_) * kterm;
  const double iterm = a * r < kBesselMinX ? 0.0 : a * std::pow(r, nu_ + 1.0) * bessel_i(nu_ + 1.0, a * r);
  return std::numbers::pi / sin_term_ * iterm + 2.0 * (1.0 - beta_) * kterm;
}

double SkewBessel::phi_scale_deriv(double lambda, double x, Side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  const double r = std::abs(x);
  const double kterm = a * r < kBesselMinX ? std::tgamma(nu_ + 1.0) * std::pow(a / 2.0, -nu_)
                                : a * std::pow(r, nu_ + 1.0) * bessel_k(nu_ + 1.0, a * r);
  if (x >= 0.0) return -2.0 * beta_ * kterm;
  const double iterm = a * r < kBesselMinX ? 0.0 : a * std::pow(r, nu_ + 1.0) * bessel_i(nu_ + 1.0, a * r);
  return -std::numbers::pi / sin_term_ * iterm - 2.0 * beta_ * kterm;
}

double SkewBessel::hitting_transform(double x, double lambda) const {
  return bessel_hitting_deriv(nu_, x, lambda, 0);
}

double SkewBessel::hitting_transform_deriv(double x, double lambda, unsigned k) const {
  return bessel_hitting_deriv(nu_, x, lambda, k);
}

// ---------------------------------------------------------------------------
// Skew Brownian motion

SkewBM::SkewBM(double beta) : beta_(beta) { require_open_unit(beta, "beta"); }

double SkewBM::speed_density(double x) const { return x > 0.0 ? 4.0 * beta_ : 4.0 * (1.0 - beta_); }

double SkewBM::scale(double x) const { return x >= 0.0 ? x / (2.0 * beta_) : x / (2.0 * (1.0 - beta_)); }

double SkewBM::psi(double lambda, double x) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x <= 0.0) return std::exp(a * x);
  return std::exp(a * x) + (1.0 - 2.0 * beta_) / beta_ * std::sinh(a * x);
}

double SkewBM::phi(double lambda, double x) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x >= 0.0) return std::exp(-a * x);
  return std::exp(-a * x) + (1.0 - 2.0 * beta_) / (1.0 - beta_) * std::sinh(a * x);
}

double SkewBM::wronskian(double lambda) const {
  require_lambda(lambda);
  return 2.0 * std::sqrt(2.0 * lambda);
}

double SkewBM::psi_scale_deriv(double lambda, double x, Side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x <= 0.0) return 2.0 * (1.0 - beta_) * a * std::exp(a * x);
  return 2.0 * beta_ * a * (std::exp(a * x) + (1.0 - 2.0 * beta_) / beta_ * std::cosh(a * x));
}

double SkewBM::phi_scale_deriv(double lambda, double x, Side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x >= 0.0) return -2.0 * beta_ * a * std::exp(-a * x);
  return 2.0 * (1.0 - beta_) * a * (-std::exp(-a * x) + (1.0 - 2.0 * beta_) / (1.0 - beta_) * std::cosh(a * x));
}

double SkewBM::hitting_transform(double x, double lambda) const {
  require_lambda(lambda);
  return exp_hitting_deriv(std::abs(x), lambda, 0);
}

double SkewBM::hitting_transform_deriv(double x, double lambda, unsigned k) const {
  require_lambda(lambda);
  check_order(k, kMaxHittingDerivative);
  return exp_hitting_deriv(std::abs(x), lambda, k);
}

// ---------------------------------------------------------------------------
// Oscillating Brownian motion

OscillatingBM::OscillatingBM(double sigma_plus, double sigma_minus) : sp_(sigma_plus), sm_(sigma_minus) {
  require_positive(sigma_plus, "sigma_plus");
  require_positive(sigma_minus, "sigma_minus");
}

double OscillatingBM::speed_density(double x) const { return x > 0.0 ? 2.0 / (sp_ * sp_) : 2.0 / (sm_ * sm_); }

double OscillatingBM::psi(double lambda, double x) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x <= 0.0) return std::exp(a * x / sm_);
  return std::cosh(a * x / sp_) + sp_ / sm_ * std::sinh(a * x / sp_);
}

// On x < 0 the solution must use sigma_minus; with that choice phi and its
// derivative are continuous at 0 and the Wronskian is sqrt(2 lambda)(1/s+ + 1/s-).
double OscillatingBM::phi(double lambda, double x) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x >= 0.0) return std::exp(-a * x / sp_);
  return std::cosh(a * x / sm_) - sm_ / sp_ * std::sinh(a * x / sm_);
}

double OscillatingBM::wronskian(double lambda) const {
  require_lambda(lambda);
  return std::sqrt(2.0 * lambda) * (1.0 / sp_ + 1.0 / sm_);
}

double OscillatingBM::psi_scale_deriv(double lambda, double x, Side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x <= 0.0) return a / sm_ * std::exp(a * x / sm_);
  return a / sp_ * std::sinh(a * x / sp_) + a / sm_ * std::cosh(a * x / sp_);
}

double OscillatingBM::phi_scale_deriv(double lambda, double x, Side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x >= 0.0) return -a / sp_ * std::exp(-a * x / sp_);
  return a / sm_ * std::sinh(a * x / sm_) - a / sp_ * std::cosh(a * x / sm_);
}

double OscillatingBM::hitting_transform(double x, double lambda) const {
  require_lambda(lambda);
  return exp_hitting_deriv(x >= 0.0 ? x / sp_ : -x / sm_, lambda, 0);
}

double OscillatingBM::hitting_transform_deriv(double x, double lambda, unsigned k) const {
  require_lambda(lambda);
  check_order(k, kMaxHittingDerivative);
  return exp_hitting_deriv(x >= 0.0 ? x / sp_ : -x / sm_, lambda, k);
}

double OscillatingBM::length_scale(double lambda) const { return sp_ / std::sqrt(2.0 * lambda); }

// ---------------------------------------------------------------------------
// Sticky Brownian motion

StickyBM::StickyBM(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be nonnegative");
}

double StickyBM::psi(double lambda, double x) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x <= 0.0) return std::exp(a * x);
  return std::exp(a * x) + gamma_ * a * std::sinh(a * x);
}

double StickyBM::phi(double lambda, double x) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x >= 0.0) return std::exp(-a * x);
  return std::exp(-a * x) - gamma_ * a * std::sinh(a * x);
}

double StickyBM::wronskian(double lambda) const {
  require_lambda(lambda);
  return 2.0 * std::sqrt(2.0 * lambda) + 2.0 * lambda * gamma_;
}

double StickyBM::psi_scale_deriv(double lambda, double x, Side side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x < 0.0 || (x == 0.0 && side == Side::left)) return a * std::exp(a * x);
  return a * std::exp(a * x) + gamma_ * a * a * std::cosh(a * x);
}

double StickyBM::phi_scale_deriv(double lambda, double x, Side side) const {
  require_lambda(lambda);
  const double a = std::sqrt(2.0 * lambda);
  if (x > 0.0 || (x == 0.0 && side == Side::right)) return -a * std::exp(-a * x);
  return -a * std::exp(-a * x) - gamma_ * a * a * std::cosh(a * x);
}

double StickyBM::hitting_transform(double x, double lambda) const {
  require_lambda(lambda);
  return exp_hitting_deriv(std::abs(x), lambda, 0);
}

double StickyBM::hitting_transform_deriv(double x, double lambda, unsigned k) const {
  require_lambda(lambda);
  check_order(k, kMaxHittingDerivative);
  return exp_hitting_deriv(std::abs(x), lambda, k);
}

// ---------------------------------------------------------------------------
// User-supplied

UserDiffusion::UserDiffusion(UserDiffusionFunctions fns) : fns_(std::move(fns)) {
  if (!fns_.speed_density || !fns_.scale || !fns_.psi || !fns_.phi || !fns_.wronskian)
    throw ParameterError("user diffusion requires speed_density, scale, psi, phi and wronskian");
  if (fns_.speed_atom_at_0 < 0.0) throw ParameterError("speed atom must be nonnegative");
  if (!fns_.hitting_deriv) fns_.max_hitting_derivative = 0;
}

double UserDiffusion::hitting_transform_deriv(double x, double lambda, unsigned k) const {
  if (k == 0) return hitting_transform(x, lambda);
  check_order(k, fns_.max_hitting_derivative);
  return fns_.hitting_deriv(x, lambda, k);
}

// ---------------------------------------------------------------------------
// Factories and free functions

std::shared_ptr<SkewBessel> make_skew_bessel(double nu, double beta) { return std::make_shared<SkewBessel>(nu, beta); }
std::shared_ptr<SkewBM> make_skew_bm(double beta) { return std::make_shared<SkewBM>(beta); }
std::shared_ptr<OscillatingBM> make_oscillating_bm(double sigma_plus, double sigma_minus) {
  return std::make_shared<OscillatingBM>(sigma_plus, sigma_minus);
}
std::shared_ptr<StickyBM> make_sticky_bm(double gamma) { return std::make_shared<StickyBM>(gamma); }

namespace {
double param(const ParamMap& p, const std::string& key, const std::string& diffusion) {
  auto it = p.find(key);
  if (it == p.end()) throw ParameterError(diffusion + " requires parameter '" + key + "'");
  return it->second;
}
}  // namespace

DiffusionPtr make_diffusion(const std::string& name, const ParamMap& params) {
  if (name == "bm") return make_skew_bm(0.5);
  if (name == "skew-bm") return make_skew_bm(param(params, "beta", name));
  if (name == "bessel") return make_skew_bessel(param(params, "nu", name), param(params, "beta", name));
  if (name == "oscillating")
    return make_oscillating_bm(param(params, "sigma_plus", name), param(params, "sigma_minus", name));
  if (name == "sticky") return make_sticky_bm(param(params, "gamma", name));
  throw ParameterError("unknown diffusion '" + name + "'");
}

double green_kernel(const Diffusion& spec, double lambda, double x, double y) { return spec.green(lambda, x, y); }

double hitting_transform_deriv(const Diffusion& spec, double x, double lambda, unsigned k) {
  return spec.hitting_transform_deriv(x, lambda, k);
}

namespace {
// Below this the integrands contribute far less than double resolution;
// tanh-sinh probes such points near the origin.
constexpr double kTinyY = 1e-250;
}  // namespace

double integrate_against_green(const Diffusion& spec, double lambda, const std::function<double(double)>& h,
                               bool positive, bool include_atom, double rel_tol) {
  require_lambda(lambda);
  const double g0 = spec.green(lambda, 0.0, 0.0);
  const double split = 4.0 * spec.length_scale(lambda);
  if (positive) {
    auto f = [&](double y) {
      if (y < kTinyY) return 0.0;
      const double g = spec.green(lambda, 0.0, y);
      return g == 0.0 ? 0.0 : g * spec.speed_density(y) * h(y);
    };
    const QuadResult r = integrate_half_line(f, split, rel_tol);
    double v = require(r, 1e-9 * std::max(1.0, std::abs(r.value)), "integral against the Green kernel on [0, inf)");
    const double atom = spec.speed_atom_at_0();
    if (include_atom && atom > 0.0) v += atom * g0 * h(0.0);
    return v;
  }
  auto f = [&](double y) {
    if (y < kTinyY) return 0.0;
    const double g = spec.green(lambda, 0.0, -y);
    return g == 0.0 ? 0.0 : g * spec.speed_density(-y) * h(-y);
  };
  const QuadResult r = integrate_half_line(f, split, rel_tol);
  return require(r, 1e-9 * std::max(1.0, std::abs(r.value)), "integral against the Green kernel on (-inf, 0)");
}

}  // namespace occtime
