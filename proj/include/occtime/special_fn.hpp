#pragma once

// Special-function kernels shared by the analytic formulas: generalized
// binomials, exact Stirling numbers and modified Bessel functions of real
// order.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace occtime {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact rational value of a finite double (every double is dyadic).
BigRational to_rational(double x);

/// Parses "p/q", "p" or a decimal literal such as "-0.3" into an exact rational.
BigRational parse_rational(const std::string& text);

/// "p/q" (or "p" when the denominator is one).
std::string format_rational(const BigRational& q);

inline double to_double(const BigRational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Falling-product binomial x(x-1)...(x-k+1)/k!. Pole-free for every real x.
double gen_binomial(double x, unsigned k);
BigRational gen_binomial(const BigRational& x, unsigned k);

BigInt factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);

/// Largest row kept in the Stirling tables.
inline constexpr unsigned kStirlingMaxRow = 64;

/// Unsigned Stirling numbers of the first kind and Stirling numbers of the
/// second kind, stored as triangular tables built once from the three-term
/// recurrences. Immutable after construction, so concurrent reads are safe.
class StirlingCache {
public:
  explicit StirlingCache(unsigned max_row = kStirlingMaxRow);

  unsigned max_row() const { return max_row_; }

  /// Zero outside 0 <= k <= n; throws std::out_of_range when n > max_row().
  const BigInt& first_kind(unsigned n, unsigned k) const;
  const BigInt& second_kind(unsigned n, unsigned k) const;

  /// Process-wide table with kStirlingMaxRow rows.
  static const StirlingCache& instance();

private:
  unsigned max_row_;
  std::vector<std::vector<BigInt>> first_;
  std::vector<std::vector<BigInt>> second_;
};

BigInt stirling1_unsigned(unsigned n, unsigned k);
BigInt stirling2(unsigned n, unsigned k);

/// Modified Bessel functions I_nu and K_nu for real order and x > 0.
/// Small arguments use Temme's series, x >= 2 uses Steed's continued
/// fraction; orders are shifted into [-1/2, 1/2] and recurred.
struct BesselIK {
  double i;
  double k;
  double ip;  // dI/dx
  double kp;  // dK/dx
};

/// Smallest argument accepted by the Bessel routines (1/x must stay finite
/// through the continued fraction).
inline constexpr double kBesselMinX = 1e-300;

/// Valid for nu >= 0 and x >= kBesselMinX.
BesselIK bessel_ik(double nu, double x);

/// K_nu(x) for any real nu. Returns 0 once e^{-x} underflows; see
/// bessel_k_checked for the flag.
double bessel_k(double nu, double x);

/// I_nu(x) for any real nu (uses I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu).
double bessel_i(double nu, double x);

/// Arguments above this return K = 0 with the underflow flag set.
inline constexpr double kBesselKUnderflowX = 700.0;

struct CheckedValue {
  double value;
  bool underflow;
};

CheckedValue bessel_k_checked(double nu, double x);

/// Fills out[j] = z^j K_{nu+j}(z), j = 0..out.size()-1, using the recurrence
/// Q_{j+1} = 2(nu+j) Q_j + z^2 Q_{j-1}; stays finite where K_{nu+j}(z) alone
/// would overflow.
void scaled_bessel_k_sequence(double nu, double z, std::vector<double>& out);

}  // namespace occtime
