#pragma once

// Occupation-time moments E_0(A_1^n): closed forms and recursions for the
// built-in families, and the Laplace-domain recursion for any Diffusion.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "occtime/diffusion.hpp"
#include "occtime/special_fn.hpp"

namespace occtime {

enum class MomentMethod { recursion, closed_form, quadrature, monte_carlo, laplace_inversion };

std::string to_string(MomentMethod m);

/// Largest moment order accepted by the table builders.
inline constexpr unsigned kMaxMomentOrder = 60;

struct MomentTable {
  std::string diffusion;
  ParamMap params;
  MomentMethod method = MomentMethod::closed_form;
  /// values[n-1] is the n-th entry.
  std::vector<double> values;
  /// Filled when the table was computed in exact rational arithmetic.
  std::vector<BigRational> exact_values;
  /// Set for Laplace-domain tables: values are U_n(lambda) = lambda^{n+1}/n! Ahat_0(lambda; n).
  std::optional<double> lambda;
  /// Monte Carlo standard errors, same indexing as values.
  std::vector<double> std_errors;
  /// Constant table returned for beta in {0, 1}.
  bool degenerate = false;

  unsigned max_order() const { return static_cast<unsigned>(values.size()); }
  bool exact() const { return !exact_values.empty(); }
  double operator[](unsigned n) const { return values.at(n - 1); }

  /// Header "n,value,method,<param keys...>" plus one row per order.
  std::string to_csv() const;
  std::string to_json(int indent = 2) const;
};

/// Hausdorff complete-monotonicity check of (1, v_1, v_2, ...): every
/// alternating finite difference is nonnegative (within tol for doubles).
bool hausdorff_moment_condition(const std::vector<double>& values, double tol = 1e-9);
bool hausdorff_moment_condition(const std::vector<BigRational>& values);

// --- Brownian motion, skew BM, oscillating BM, spider -----------------------

/// C(2n, n) / 4^n, exact.
BigRational arcsine_moment(unsigned n);
MomentTable bm_moments(unsigned N);

/// sum_{k=0}^{n-1} C(n-1+k, k) beta^{n-k} / 2^{n+k-1}.
double skew_bm_moment(double beta, unsigned n);
BigRational skew_bm_moment(const BigRational& beta, unsigned n);
MomentTable skew_bm_moments(double beta, unsigned N);
MomentTable skew_bm_moments(const BigRational& beta, unsigned N);

MomentTable oscillating_moments(double sigma_plus, double sigma_minus, unsigned N);
MomentTable oscillating_moments(const BigRational& sigma_plus, const BigRational& sigma_minus, unsigned N);

/// rays are 1-based indices into p.
MomentTable spider_moments(const std::vector<double>& p, const std::set<unsigned>& rays, unsigned N);
MomentTable spider_moments(const std::vector<BigRational>& p, const std::set<unsigned>& rays, unsigned N);

// --- skew Bessel --------------------------------------------------------------

/// E_n = beta C(nu+n-1, n-1) - beta sum_{k=1}^{n-1} C(nu+k-1, k) E_{n-k}.
std::vector<double> bessel_recursive_values(double nu, double beta, unsigned N);
std::vector<BigRational> bessel_recursive_values(const BigRational& nu, const BigRational& beta, unsigned N);

/// Stirling double sum evaluated exactly; terms alternate in sign, so the
/// double overload converts its inputs to exact rationals first.
std::vector<BigRational> bessel_closed_values(const BigRational& nu, const BigRational& beta, unsigned N);
std::vector<double> bessel_closed_values(double nu, double beta, unsigned N);

MomentTable bessel_moments_recursive(double nu, double beta, unsigned N);
MomentTable bessel_moments_recursive(const BigRational& nu, const BigRational& beta, unsigned N);
MomentTable bessel_moments_closed(double nu, double beta, unsigned N);
MomentTable bessel_moments_closed(const BigRational& nu, const BigRational& beta, unsigned N);

/// beta C(nu+k-1, k).
double bessel_dk(double nu, double beta, unsigned k);

// --- sticky Brownian motion ---------------------------------------------------

/// 1 / (2 + gamma sqrt(2 lambda)).
double sticky_h(double gamma, double lambda);
/// C(2n, n) / (4^n (2n-1)).
BigRational sticky_t(unsigned n);
/// U_n(lambda) = lambda^{n+1} Bhat_n(lambda) / n! for the B-functional.
double sticky_u(double gamma, double lambda, unsigned n);
/// Laplace transform of E_0(B_t^n).
double sticky_bhat(double gamma, double lambda, unsigned n);
/// D_k for the A-functional (include_atom) or the B-functional.
double sticky_dk(double gamma, double lambda, unsigned k, bool include_atom);
/// Laplace-domain table of U_n(lambda), B-functional.
MomentTable sticky_moments(double gamma, double lambda, unsigned N);

// --- generic Laplace-domain recursion ----------------------------------------

struct GenericMomentResult {
  MomentTable table;         // U_n(lambda), n = 1..N
  std::vector<double> ahat;  // Ahat_0(lambda; n), n = 1..N
  std::vector<double> dk;    // D_k(lambda), k = 1..N-1
};

/// Quadrature of the first-moment integral and of every D_k, then the
/// recursion U_n = U_1 + sum_k (1 - U_{n-k}) D_k. include_atom = false drops
/// the speed atom at 0 (B-functional of a sticky point).
GenericMomentResult generic_laplace_moments(const Diffusion& spec, double lambda, unsigned N,
                                            bool include_atom = true);

/// D_k(lambda) by quadrature alone.
double generic_dk(const Diffusion& spec, double lambda, unsigned k, bool include_atom = true);

}  // namespace occtime
