#pragma once

// Moment generating functions of occupation times stopped at an independent
// exponential time T ~ Exp(lambda).

#include <string>
#include <vector>

#include "occtime/diffusion.hpp"

namespace occtime {

enum class MgfMethod { closed_form, quadrature, two_sided };

std::string to_string(MgfMethod m);

struct MgfValue {
  double value = 1.0;
  double lambda = 0.0;
  double r = 0.0;
  double q = 0.0;
  double x = 0.0;      // starting point
  double alpha = 0.0;  // threshold of the two-sided split
  std::string side;    // "plus" / "minus" for two-sided queries
  std::string diffusion;
  ParamMap params;
  MgfMethod method = MgfMethod::quadrature;

  std::string to_json(int indent = 2) const;
};

/// E_x exp(-r A_T): the x = 0 value from the two Green-kernel integrals over
/// [0, inf), then composed with the hitting transform for x != 0.
MgfValue mgf_exp_time(const Diffusion& spec, double lambda, double r, double x = 0.0);

/// (beta lambda^{nu+1} + (1-beta)(lambda+r)^{nu+1}) / (beta (lambda+r) lambda^nu + (1-beta)(lambda+r)^{nu+1}).
MgfValue mgf_bessel_closed(double nu, double beta, double lambda, double r);

/// Which occupation functional receives the time spent exactly at the threshold.
enum class ZeroSide { plus, minus };

/// E_0 exp(-r A_T^+ - q A_T^-) from psi, phi and their one-sided scale
/// derivatives at alpha: left derivatives when the threshold belongs to A^+
/// (ZeroSide::plus), right derivatives otherwise.
MgfValue mgf_two_sided(const Diffusion& spec, double lambda, double r, double q, ZeroSide side = ZeroSide::plus,
                       double alpha = 0.0);

struct MgfMomentCheck {
  unsigned n;
  double finite_difference;  // n-th r-derivative of the MGF at r = 0
  double expected;           // (-1)^n n!/lambda^n E_0(A_1^n)
  double rel_error;
};

/// Fourth-order central differences with step 1e-3 lambda of r -> mgf_exp_time
/// against the moments implied by self-similarity, using `moments`
/// (E_0(A_1^n), n = 1..N) as the reference.
std::vector<MgfMomentCheck> mgf_moment_consistency(const Diffusion& spec, double lambda,
                                                   const std::vector<double>& moments);

/// Weights of the central finite-difference stencil of the given derivative
/// order and accuracy order on the integer offsets -p..p (Fornberg's algorithm).
std::vector<double> central_difference_weights(unsigned derivative, unsigned accuracy);

}  // namespace occtime
