#pragma once

// One-dimensional diffusion descriptors: speed measure, scale function,
// fundamental solutions psi/phi, Wronskian, Green kernel and the Laplace
// transform of the first hitting time of 0 together with its lambda
// derivatives.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace occtime {

using ParamMap = std::map<std::string, double>;

/// Which one-sided scale derivative to take.
enum class Side { left, right };

/// Raised when a constructor or evaluation receives out-of-range parameters.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Largest lambda-derivative order supported by the analytic hitting-time
/// expansions.
inline constexpr unsigned kMaxHittingDerivative = 32;

class Diffusion {
public:
  virtual ~Diffusion() = default;

  virtual std::string name() const = 0;
  virtual ParamMap params() const = 0;

  /// Lebesgue density of the speed measure, excluding any atom at 0.
  virtual double speed_density(double x) const = 0;
  virtual double speed_atom_at_0() const { return 0.0; }
  /// Scale function normalised so that scale(0) = 0.
  virtual double scale(double x) const = 0;

  /// Increasing and decreasing fundamental solutions of d/dm d/dS u = lambda u.
  virtual double psi(double lambda, double x) const = 0;
  virtual double phi(double lambda, double x) const = 0;
  virtual double wronskian(double lambda) const = 0;

  /// One-sided derivatives with respect to the scale function. The default
  /// uses a second-order one-sided difference quotient in S.
  virtual double psi_scale_deriv(double lambda, double x, Side side) const;
  virtual double phi_scale_deriv(double lambda, double x, Side side) const;

  /// E_x exp(-lambda H_0): phi(x)/phi(0) for x >= 0, psi(x)/psi(0) for x <= 0.
  virtual double hitting_transform(double x, double lambda) const;
  /// k-th lambda derivative (-1)^k E_x(H_0^k e^{-lambda H_0}). Built-ins use
  /// exact expansions; the default only handles k = 0.
  virtual double hitting_transform_deriv(double x, double lambda, unsigned k) const;
  virtual unsigned max_hitting_derivative() const { return 0; }

  /// True when (X_{at}) has the law of (sqrt(a) X_t); then A_t = t A_1 in law.
  virtual bool self_similar() const = 0;

  /// Spatial decay length of phi_lambda on the positive half-line; used to
  /// split quadrature ranges.
  virtual double length_scale(double lambda) const;

  /// Green (resolvent) kernel w^{-1} psi(min(x,y)) phi(max(x,y)).
  double green(double lambda, double x, double y) const;
};

using DiffusionPtr = std::shared_ptr<const Diffusion>;

/// Skew two-sided Bessel process, nu in (-1, 0), beta in (0, 1).
class SkewBessel final : public Diffusion {
public:
  SkewBessel(double nu, double beta);

  double nu() const { return nu_; }
  double beta() const { return beta_; }

  std::string name() const override { return "bessel"; }
  ParamMap params() const override { return {{"nu", nu_}, {"beta", beta_}}; }
  double speed_density(double x) const override;
  double scale(double x) const override;
  double psi(double lambda, double x) const override;
  double phi(double lambda, double x) const override;
  double wronskian(double lambda) const override;
  double psi_scale_deriv(double lambda, double x, Side side) const override;
  double phi_scale_deriv(double lambda, double x, Side side) const override;
  double hitting_transform(double x, double lambda) const override;
  double hitting_transform_deriv(double x, double lambda, unsigned k) const override;
  unsigned max_hitting_derivative() const override { return kMaxHittingDerivative; }
  bool self_similar() const override { return true; }

  /// Reflected one-sided solutions x^{-nu} I_nu(x sqrt(2 lambda)) and
  /// x^{-nu} K_nu(x sqrt(2 lambda)), with their limits at x = 0.
  double psi_hat(double lambda, double x) const;
  double phi_hat(double lambda, double x) const;

private:
  double nu_;
  double beta_;
  double sin_term_;  // sin(-pi nu)
};

/// Skew Brownian motion with skewness beta in (0, 1).
class SkewBM final : public Diffusion {
public:
  explicit SkewBM(double beta);

  double beta() const { return beta_; }

  std::string name() const override { return "skew-bm"; }
  ParamMap params() const override { return {{"beta", beta_}}; }
  double speed_density(double x) const override;
  double scale(double x) const override;
  double psi(double lambda, double x) const override;
  double phi(double lambda, double x) const override;
  double wronskian(double lambda) const override;
  double psi_scale_deriv(double lambda, double x, Side side) const override;
  double phi_scale_deriv(double lambda, double x, Side side) const override;
  double hitting_transform(double x, double lambda) const override;
  double hitting_transform_deriv(double x, double lambda, unsigned k) const override;
  unsigned max_hitting_derivative() const override { return kMaxHittingDerivative; }
  bool self_similar() const override { return true; }

private:
  double beta_;
};

/// Brownian motion with volatility sigma_plus on [0, inf) and sigma_minus on (-inf, 0).
class OscillatingBM final : public Diffusion {
public:
  OscillatingBM(double sigma_plus, double sigma_minus);

  double sigma_plus() const { return sp_; }
  double sigma_minus() const { return sm_; }
  /// Skewness of the skew Brownian motion with the same occupation law.
  double equivalent_beta() const { return sm_ / (sp_ + sm_); }

  std::string name() const override { return "oscillating"; }
  ParamMap params() const override { return {{"sigma_plus", sp_}, {"sigma_minus", sm_}}; }
  double speed_density(double x) const override;
  double scale(double x) const override { return x; }
  double psi(double lambda, double x) const override;
  double phi(double lambda, double x) const override;
  double wronskian(double lambda) const override;
  double psi_scale_deriv(double lambda, double x, Side side) const override;
  double phi_scale_deriv(double lambda, double x, Side side) const override;
  double hitting_transform(double x, double lambda) const override;
  double hitting_transform_deriv(double x, double lambda, unsigned k) const override;
  unsigned max_hitting_derivative() const override { return kMaxHittingDerivative; }
  bool self_similar() const override { return true; }
  double length_scale(double lambda) const override;

private:
  double sp_;
  double sm_;
};

/// Brownian motion sticky at 0: m(dx) = 2 dx + 2 gamma delta_0(dx).
class StickyBM final : public Diffusion {
public:
  explicit StickyBM(double gamma);

  double gamma() const { return gamma_; }

  std::string name() const override { return "sticky"; }
  ParamMap params() const override { return {{"gamma", gamma_}}; }
  double speed_density(double) const override { return 2.0; }
  double speed_atom_at_0() const override { return 2.0 * gamma_; }
  double scale(double x) const override { return x; }
  double psi(double lambda, double x) const override;
  double phi(double lambda, double x) const override;
  double wronskian(double lambda) const override;
  double psi_scale_deriv(double lambda, double x, Side side) const override;
  double phi_scale_deriv(double lambda, double x, Side side) const override;
  double hitting_transform(double x, double lambda) const override;
  double hitting_transform_deriv(double x, double lambda, unsigned k) const override;
  unsigned max_hitting_derivative() const override { return kMaxHittingDerivative; }
  bool self_similar() const override { return false; }

private:
  double gamma_;
};

/// Diffusion assembled from caller-supplied functions. The caller certifies
/// the boundary classification; nothing here solves the generator ODE.
struct UserDiffusionFunctions {
  std::string name = "user";
  ParamMap params;
  std::function<double(double)> speed_density;
  double speed_atom_at_0 = 0.0;
  std::function<double(double)> scale;
  std::function<double(double, double)> psi;  // (lambda, x)
  std::function<double(double, double)> phi;
  std::function<double(double)> wronskian;
  /// Optional (x, lambda, k) -> k-th lambda derivative of the hitting transform.
  std::function<double(double, double, unsigned)> hitting_deriv;
  unsigned max_hitting_derivative = 0;
  bool self_similar = false;
};

class UserDiffusion final : public Diffusion {
public:
  explicit UserDiffusion(UserDiffusionFunctions fns);

  std::string name() const override { return fns_.name; }
  ParamMap params() const override { return fns_.params; }
  double speed_density(double x) const override { return fns_.speed_density(x); }
  double speed_atom_at_0() const override { return fns_.speed_atom_at_0; }
  double scale(double x) const override { return fns_.scale(x); }
  double psi(double lambda, double x) const override { return fns_.psi(lambda, x); }
  double phi(double lambda, double x) const override { return fns_.phi(lambda, x); }
  double wronskian(double lambda) const override { return fns_.wronskian(lambda); }
  double hitting_transform_deriv(double x, double lambda, unsigned k) const override;
  unsigned max_hitting_derivative() const override { return fns_.max_hitting_derivative; }
  bool self_similar() const override { return fns_.self_similar; }

private:
  UserDiffusionFunctions fns_;
};

std::shared_ptr<SkewBessel> make_skew_bessel(double nu, double beta);
std::shared_ptr<SkewBM> make_skew_bm(double beta);
std::shared_ptr<OscillatingBM> make_oscillating_bm(double sigma_plus, double sigma_minus);
std::shared_ptr<StickyBM> make_sticky_bm(double gamma);

/// Builds a built-in diffusion from its config name ("bm", "skew-bm",
/// "bessel", "oscillating", "sticky") and parameter map ("beta", "nu",
/// "sigma_plus", "sigma_minus", "gamma").
DiffusionPtr make_diffusion(const std::string& name, const ParamMap& params);

double green_kernel(const Diffusion& spec, double lambda, double x, double y);
double hitting_transform_deriv(const Diffusion& spec, double x, double lambda, unsigned k);

/// Integral of h(y) G_lambda(0, y) m(dy) over [0, inf) (positive = true) or
/// over (-inf, 0) (positive = false). The speed atom at 0 belongs to the
/// positive side and is added unless include_atom is false.
double integrate_against_green(const Diffusion& spec, double lambda, const std::function<double(double)>& h,
                               bool positive, bool include_atom = true, double rel_tol = 1e-13);

/// Coefficients a_{k,j}, j = 1..k, of the expansion
///   d^k/dlambda^k f(x; lambda) = 2^{nu+1} / (lambda^k Gamma(-nu)) z^{-nu} sum_j a_{k,j} z^j K_{nu+j}(z),
/// z = x sqrt(2 lambda), for f(x; lambda) = 2^{nu+1}/Gamma(-nu) z^{-nu} K_nu(z).
/// Exact rationals folded to double; index [k][j].
const std::vector<std::vector<double>>& bessel_hitting_coefficients();

/// f^{(k)} for the Bessel-type hitting transform at |x| > 0.
double bessel_hitting_deriv(double nu, double x, double lambda, unsigned k);

}  // namespace occtime
