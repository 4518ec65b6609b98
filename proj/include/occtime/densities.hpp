#pragma once

// Occupation-time laws on (0, 1): Lamperti, skew-BM and arcsine densities,
// their distribution functions, and a quadrature moment oracle.

#include <memory>
#include <string>
#include <vector>

#include "occtime/diffusion.hpp"

namespace occtime {

double lamperti_pdf(double nu, double beta, double x);
double skew_bm_pdf(double beta, double x);
double skew_bm_cdf(double beta, double x);
double arcsine_pdf(double x);
double arcsine_cdf(double x);

/// Piecewise Chebyshev interpolant of the Lamperti distribution function.
/// On [0, 1/2] it is built in u = x^{|nu|}, on [1/2, 1] in v = (1-x)^{|nu|};
/// both transformed densities are bounded, so cumulative Gauss-Kronrod
/// quadrature gives the node values. Panels shrink geometrically towards
/// u = 0 where the transformed density is only finitely smooth.
class LampertiCdf {
public:
  LampertiCdf(double nu, double beta);

  double operator()(double x) const;
  /// Evaluates many points; points are grouped by panel and handed to the
  /// vectorised Clenshaw kernel.
  std::vector<double> evaluate(const std::vector<double>& x) const;

  double nu() const { return nu_; }
  double beta() const { return beta_; }

private:
  struct Panel {
    double lo, hi;
    std::vector<double> coef;  // Chebyshev coefficients on [lo, hi]
  };
  struct Half {
    std::vector<Panel> panels;  // ordered by lo
    double total = 0.0;         // integral over the whole half
    std::size_t locate(double u) const;
  };

  Half build_half(double beta_side) const;
  double eval_half(const Half& h, double u) const;

  double nu_;
  double beta_;
  double q_;       // 1 / |nu|
  double u_mid_;   // (1/2)^{|nu|}
  Half left_;      // P(A <= x) for x <= 1/2
  Half right_;     // P(A >= 1 - y) for y <= 1/2
};

/// Transformed Lamperti density on the left half: with x = u^q, q = 1/|nu|,
/// g(u) = q u^{q-1} f(x) is bounded on [0, (1/2)^{|nu|}].
double lamperti_left_transformed(double nu, double beta, double u);

enum class DensityFamily { lamperti, skew_bm, arcsine };

std::string to_string(DensityFamily f);

class OccupationDensity {
public:
  static OccupationDensity lamperti(double nu, double beta);
  static OccupationDensity skew_bm(double beta);
  static OccupationDensity arcsine();

  DensityFamily family() const { return family_; }
  double nu() const { return nu_; }
  double beta() const { return beta_; }
  ParamMap params() const;

  /// Throws ParameterError outside (0, 1).
  double pdf(double x) const;
  /// Clamped to 0 below 0 and 1 above 1.
  double cdf(double x) const;
  std::vector<double> cdf(const std::vector<double>& x) const;

private:
  OccupationDensity(DensityFamily f, double nu, double beta);

  DensityFamily family_;
  double nu_;
  double beta_;
  std::shared_ptr<const LampertiCdf> lamperti_cdf_;
};

/// The law of A_1 under P_0 for a built-in diffusion, when it is one of the
/// families above (skew Bessel, skew BM, BM, oscillating BM).
OccupationDensity occupation_law(const Diffusion& spec);

/// Largest order accepted by density_moment_oracle.
inline constexpr unsigned kMaxOracleOrder = 20;

/// int_0^1 x^n f(x) dx with the power substitutions x = u^{1/|nu|} on
/// [0, 1/2] and 1 - x = v^{1/|nu|} on [1/2, 1]; n = 0 gives the total mass.
double density_moment_oracle(const OccupationDensity& d, unsigned n, double abs_tol = 1e-10);

}  // namespace occtime
