#include "occtime/quadrature.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace occtime {

namespace bq = boost::math::quadrature;

QuadResult integrate_gk(const Integrand& f, double a, double b, double rel_tol, unsigned max_depth) {
  QuadResult r;
  double l1 = 0.0;
  r.value = bq::gauss_kronrod<double, 21>::integrate(f, a, b, max_depth, rel_tol, &r.error, &l1);
  r.converged = r.error <= std::max(rel_tol * l1, 1e3 * std::numeric_limits<double>::min());
  return r;
}

QuadResult integrate_tanh_sinh(const Integrand& f, double a, double b, double rel_tol) {
  static thread_local bq::tanh_sinh<double> integrator;
  QuadResult r;
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = integrator.integrate(f, a, b, rel_tol, &r.error, &l1, &levels);
  r.converged = r.error <= std::max(10.0 * rel_tol * l1, 1e3 * std::numeric_limits<double>::min());
  return r;
}

QuadResult integrate_exp_sinh(const Integrand& f, double a, double rel_tol) {
  static thread_local bq::exp_sinh<double> integrator;
  QuadResult r;
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &r.error, &l1, &levels);
  r.converged = r.error <= std::max(10.0 * rel_tol * l1, 1e3 * std::numeric_limits<double>::min());
  return r;
}

QuadResult integrate_half_line(const Integrand& f, double split, double rel_tol) {
  const QuadResult head = integrate_tanh_sinh(f, 0.0, split, rel_tol);
  const QuadResult tail = integrate_exp_sinh(f, split, rel_tol);
  return {head.value + tail.value, head.error + tail.error, head.converged && tail.converged};
}

double require(const QuadResult& r, double abs_tol, const char* what) {
  if (!std::isfinite(r.value) || r.error > abs_tol) throw QuadratureError(what, r.error);
  return r.value;
}

}  // namespace occtime
