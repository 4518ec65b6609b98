#pragma once

// Numerical inversion of Laplace transforms by the fixed Talbot contour, the
// sticky-BM occupation transforms, and the small-lambda limit diagnostics.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace occtime {

enum class KnownSign { positive, unknown };

/// Laplace-domain function. The contour method needs values off the real
/// axis, so eval takes a complex argument; operator() restricts to lambda > 0.
struct TransformFn {
  std::function<std::complex<double>(std::complex<double>)> eval;
  KnownSign known_sign = KnownSign::unknown;
  std::string growth_note;

  double operator()(double lambda) const { return eval({lambda, 0.0}).real(); }
};

struct InversionOptions {
  unsigned order = 32;  // M; the estimate compares against M / 2
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  bool throw_on_failure = true;
};

struct InversionResult {
  double t = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;  // |f_M(t) - f_{M/2}(t)|
  unsigned order = 0;
  bool converged = true;
};

class InversionError : public std::runtime_error {
public:
  InversionError(const std::string& what, InversionResult r) : std::runtime_error(what), result_(r) {}
  const InversionResult& result() const { return result_; }

private:
  InversionResult result_;
};

/// Fixed Talbot approximation of order M (Abate-Valko) at a single t > 0.
double talbot(const TransformFn& f, double t, unsigned M);

InversionResult invert(const TransformFn& f, double t, const InversionOptions& opts = {});

struct KnownPair {
  std::string name;
  TransformFn transform;
  std::function<double(double)> exact;
};

/// Analytic transform pairs used to exercise the inverter.
std::vector<KnownPair> known_transform_pairs();

/// Transform of E_0(B_t^n) for sticky BM: n!/s^{n+1} sum_k C(n-1+k, k) H^{n-k} / 2^{n+k-1}
/// with H(s) = 1 / (2 + gamma sqrt(2 s)), principal square root.
std::complex<double> sticky_bhat_complex(double gamma, unsigned n, std::complex<double> s);
TransformFn sticky_bhat_transform(double gamma, unsigned n);

/// E_0(B_t^n) for sticky BM by inversion.
InversionResult sticky_time_moment(double gamma, unsigned n, double t, const InversionOptions& opts = {});

struct TauberianPoint {
  double lambda;
  double value;  // lambda^{n+1} Bhat_n(lambda)
};

struct TauberianReport {
  double gamma = 0.0;
  unsigned n = 0;
  double limit = 0.0;  // n! C(2n, n) / 4^n
  std::vector<TauberianPoint> grid;
  bool monotone = true;   // values nondecreasing towards the limit as lambda falls
  double gap = 0.0;       // |value(lambda_min) - limit| / limit
};

/// lambda runs over 1, 1e-1, ... down to lambda_min (included).
TauberianReport tauberian_check(double gamma, unsigned n, double lambda_min);

}  // namespace occtime
