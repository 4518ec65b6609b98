#pragma once

// Thin wrappers over Boost.Math quadrature so the numeric modules share one
// error-reporting convention.

#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

namespace occtime {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  bool converged = true;
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error " + format_error(achieved) + ")"), achieved_(achieved) {}
  double achieved() const { return achieved_; }

private:
  static std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", e);
    return buf;
  }
  double achieved_;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (21 point) on a finite interval with a smooth integrand.
QuadResult integrate_gk(const Integrand& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 30);

/// Tanh-sinh on (a, b); tolerates integrable endpoint singularities.
QuadResult integrate_tanh_sinh(const Integrand& f, double a, double b, double rel_tol = 1e-13);

/// Exp-sinh on (a, inf) for integrands with exponential decay.
QuadResult integrate_exp_sinh(const Integrand& f, double a, double rel_tol = 1e-13);

/// (0, inf) with a possible integrable singularity at 0: tanh-sinh on
/// (0, split) plus exp-sinh on (split, inf).
QuadResult integrate_half_line(const Integrand& f, double split, double rel_tol = 1e-13);

/// Throws QuadratureError when the estimated error exceeds abs_tol.
double require(const QuadResult& r, double abs_tol, const char* what);

}  // namespace occtime
