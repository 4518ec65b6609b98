#include "occtime/laplace.hpp"

#include <cmath>
#include <numbers>

#include "occtime/diffusion.hpp"
#include "occtime/moments.hpp"
#include "occtime/special_fn.hpp"

namespace occtime {

namespace {

using cplx = std::complex<double>;

void check_sticky_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be nonnegative");
}

}  // namespace

double talbot(const TransformFn& f, double t, unsigned M) {
  if (!(t > 0.0)) throw ParameterError("inversion time must be positive");
  if (M < 2) throw ParameterError("Talbot order must be at least 2");
  const double r = 2.0 * M / (5.0 * t);
  double sum = 0.5 * std::exp(r * t) * f.eval({r, 0.0}).real();
  for (unsigned k = 1; k < M; ++k) {
    const double theta = k * std::numbers::pi / M;
    const double cot = std::cos(theta) / std::sin(theta);
    const cplx s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    sum += (std::exp(t * s) * f.eval(s) * cplx(1.0, sigma)).real();
  }
  return r / M * sum;
}

InversionResult invert(const TransformFn& f, double t, const InversionOptions& opts) {
  InversionResult res;
  res.t = t;
  res.order = opts.order;
  res.value = talbot(f, t, opts.order);
  const double coarse = talbot(f, t, opts.order / 2);
  res.error_estimate = std::abs(res.value - coarse);
  res.converged = std::isfinite(res.value) && res.error_estimate <= opts.rel_tol * std::abs(res.value) + opts.abs_tol;
  if (!res.converged && opts.throw_on_failure)
    throw InversionError("Laplace inversion did not converge at t = " + std::to_string(t), res);
  return res;
}

std::vector<KnownPair> known_transform_pairs() {
  std::vector<KnownPair> out;
  out.push_back({"1/s^2", {[](cplx s) { return 1.0 / (s * s); }, KnownSign::positive, "s^-2"},
                 [](double t) { return t; }});
  out.push_back({"3!/s^4", {[](cplx s) { return 6.0 / (s * s * s * s); }, KnownSign::positive, "s^-4"},
                 [](double t) { return t * t * t; }});
  out.push_back({"1/(s+1)", {[](cplx s) { return 1.0 / (s + 1.0); }, KnownSign::positive, "pole at -1"},
                 [](double t) { return std::exp(-t); }});
  out.push_back({"1/sqrt(s)", {[](cplx s) { return 1.0 / std::sqrt(s); }, KnownSign::positive, "branch point at 0"},
                 [](double t) { return 1.0 / std::sqrt(std::numbers::pi * t); }});
  out.push_back({"exp(-sqrt(s))/s",
                 {[](cplx s) { return std::exp(-std::sqrt(s)) / s; }, KnownSign::positive, "branch point at 0"},
                 [](double t) { return std::erfc(0.5 / std::sqrt(t)); }});
  out.push_back({"1/(s(s+1))", {[](cplx s) { return 1.0 / (s * (s + 1.0)); }, KnownSign::positive, "poles at 0, -1"},
                 [](double t) { return -std::expm1(-t); }});
  return out;
}

std::complex<double> sticky_bhat_complex(double gamma, unsigned n, std::complex<double> s) {
  check_sticky_gamma(gamma);
  if (n == 0) return 1.0 / s;
  const cplx h = 1.0 / (2.0 + gamma * std::sqrt(2.0 * s));
  cplx u = 0.0;
  for (unsigned k = 0; k < n; ++k)
    u += binomial(n - 1 + k, k).convert_to<double>() * std::pow(h, static_cast<int>(n - k)) /
         std::ldexp(1.0, static_cast<int>(n + k - 1));
  return std::exp(std::lgamma(n + 1.0)) * u / std::pow(s, static_cast<int>(n + 1));
}

TransformFn sticky_bhat_transform(double gamma, unsigned n) {
  check_sticky_gamma(gamma);
  TransformFn f;
  f.eval = [gamma, n](cplx s) { return sticky_bhat_complex(gamma, n, s); };
  f.known_sign = KnownSign::positive;
  f.growth_note = "~ n! C(2n,n) 4^-n s^-(n+1) as s -> 0; ~ n! H(s)^n s^-(n+1) as s -> inf";
  return f;
}

InversionResult sticky_time_moment(double gamma, unsigned n, double t, const InversionOptions& opts) {
  return invert(sticky_bhat_transform(gamma, n), t, opts);
}

TauberianReport tauberian_check(double gamma, unsigned n, double lambda_min) {
  check_sticky_gamma(gamma);
  if (n == 0) throw ParameterError("order must be positive");
  if (!(lambda_min > 0.0 && lambda_min <= 1.0)) throw ParameterError("lambda_min must lie in (0, 1]");
  TauberianReport rep;
  rep.gamma = gamma;
  rep.n = n;
  const double nfact = std::exp(std::lgamma(n + 1.0));
  rep.limit = nfact * to_double(arcsine_moment(n));
  for (double lambda = 1.0;; lambda /= 10.0) {
    if (lambda < lambda_min * (1.0 + 1e-9)) lambda = lambda_min;
    // lambda^{n+1} Bhat_n = n! U_n, a positive sum in H: no cancellation.
    rep.grid.push_back({lambda, nfact * sticky_u(gamma, lambda, n)});
    if (lambda == lambda_min) break;
  }
  for (std::size_t i = 1; i < rep.grid.size(); ++i)
    if (rep.grid[i].value < rep.grid[i - 1].value || rep.grid[i].value > rep.limit * (1.0 + 1e-15)) rep.monotone = false;
  rep.gap = std::abs(rep.grid.back().value - rep.limit) / rep.limit;
  return rep;
}

}  // namespace occtime
