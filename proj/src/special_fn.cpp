#include "occtime/special_fn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace occtime {

BigRational to_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("to_rational: non-finite value");
  if (x == 0.0) return BigRational(0);
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // 53 significant bits fit exactly in an int64.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  BigInt num(scaled);
  if (exponent >= 0) {
    num <<= exponent;
    return BigRational(num);
  }
  BigInt den(1);
  den <<= -exponent;
  return BigRational(num, den);
}

BigRational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt p(text.substr(0, slash));
    BigInt q(text.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return BigRational(p, q);
  }
  std::string s = text;
  bool negative = false;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  int exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    exp10 = std::stoi(s.substr(e + 1));
    s.erase(e);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<int>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("parse_rational: malformed number '" + text + "'");
  BigInt digits(s);
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), std::abs(exp10));
  BigRational value = exp10 >= 0 ? BigRational(digits * ten_pow) : BigRational(digits, ten_pow);
  return negative ? BigRational(-value) : value;
}

std::string format_rational(const BigRational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double gen_binomial(double x, unsigned k) {
  double result = 1.0;
  for (unsigned i = 0; i < k; ++i) result *= (x - i) / (i + 1);
  return result;
}

BigRational gen_binomial(const BigRational& x, unsigned k) {
  BigRational result(1);
  for (unsigned i = 0; i < k; ++i) {
    result *= (x - i);
    result /= (i + 1);
  }
  return result;
}

BigInt factorial(unsigned n) {
  BigInt result(1);
  for (unsigned i = 2; i <= n; ++i) result *= i;
  return result;
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt result(1);
  for (unsigned i = 0; i < k; ++i) {
    result *= (n - i);
    result /= (i + 1);
  }
  return result;
}

StirlingCache::StirlingCache(unsigned max_row) : max_row_(max_row) {
  first_.resize(max_row + 1);
  second_.resize(max_row + 1);
  first_[0] = {BigInt(1)};
  second_[0] = {BigInt(1)};
  for (unsigned n = 0; n < max_row; ++n) {
    auto& f = first_[n + 1];
    auto& s = second_[n + 1];
    f.assign(n + 2, BigInt(0));
    s.assign(n + 2, BigInt(0));
    for (unsigned k = 1; k <= n + 1; ++k) {
      const BigInt f_same = k <= n ? first_[n][k] : BigInt(0);
      const BigInt s_same = k <= n ? second_[n][k] : BigInt(0);
      f[k] = n * f_same + first_[n][k - 1];
      s[k] = k * s_same + second_[n][k - 1];
    }
  }
}

namespace {
const BigInt& zero_bigint() {
  static const BigInt zero(0);
  return zero;
}
}  // namespace

const BigInt& StirlingCache::first_kind(unsigned n, unsigned k) const {
  if (n > max_row_) throw std::out_of_range("Stirling table row " + std::to_string(n) + " exceeds cap");
  if (k > n) return zero_bigint();
  return first_[n][k];
}

const BigInt& StirlingCache::second_kind(unsigned n, unsigned k) const {
  if (n > max_row_) throw std::out_of_range("Stirling table row " + std::to_string(n) + " exceeds cap");
  if (k > n) return zero_bigint();
  return second_[n][k];
}

const StirlingCache& StirlingCache::instance() {
  static const StirlingCache cache;
  return cache;
}

BigInt stirling1_unsigned(unsigned n, unsigned k) { return StirlingCache::instance().first_kind(n, k); }
BigInt stirling2(unsigned n, unsigned k) { return StirlingCache::instance().second_kind(n, k); }

// ---------------------------------------------------------------------------
// Bessel functions

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIter = 100000;
constexpr double kSeriesCrossover = 2.0;

// (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and its even partner, for |mu| <= 1/2.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  using boost::math::tgamma1pm1;
  const double gp = tgamma1pm1(mu);   // Gamma(1+mu) - 1
  const double gm = tgamma1pm1(-mu);  // Gamma(1-mu) - 1
  gampl = 1.0 / (1.0 + gp);
  gammi = 1.0 / (1.0 + gm);
  if (std::abs(mu) < kEps) {
    gam1 = -std::numbers::egamma;
  } else {
    gam1 = (gp - gm) / (2.0 * mu) * gampl * gammi;
  }
  gam2 = 0.5 * (gammi + gampl);
}

}  // namespace

BesselIK bessel_ik(double nu, double x) {
  if (!(x >= kBesselMinX)) throw std::domain_error("bessel_ik: x below the supported range");
  if (nu < 0.0) throw std::domain_error("bessel_ik: order must be nonnegative");

  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;

  // CF1 for I'_nu / I_nu. Below the crossover the Wronskian normalisation
  // loses digits, so I comes from its power series instead.
  const bool series_i = x < kSeriesCrossover;
  double f = 0.0, ril = 1.0, ril1 = 1.0, rip1 = 0.0;
  if (!series_i) {
    double h = nu * xi;
    if (h < kTiny) h = kTiny;
    double b = xi2 * nu;
    double d = 0.0;
    double c = h;
    int it = 0;
    for (; it < kMaxIter; ++it) {
      b += xi2;
      d = 1.0 / (b + d);
      c = b + 1.0 / c;
      const double del = c * d;
      h *= del;
      if (std::abs(del - 1.0) < kEps) break;
    }
    if (it >= kMaxIter) throw std::runtime_error("bessel_ik: continued fraction CF1 did not converge");

    ril = kTiny;
    double ripl = h * ril;
    ril1 = ril;
    rip1 = ripl;
    double fact = nu * xi;
    for (int l = nl - 1; l >= 0; --l) {
      const double ritemp = fact * ril + ripl;
      fact -= xi;
      ripl = fact * ritemp + ril;
      ril = ritemp;
    }
    f = ripl / ril;
  }

  double rkmu = 0.0;
  double rk1 = 0.0;
  if (x < kSeriesCrossover) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fct = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = mu * dd;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fct * (gam1 * std::cosh(e) + gam2 * fact2 * dd);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double cc = 1.0;
    dd = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      cc *= dd / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = cc * ff;
      sum += del;
      const double del1 = cc * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw std::runtime_error("bessel_ik: Temme series did not converge");
    rkmu = sum;
    rk1 = sum1 * xi2;
  } else {
    // Steed's CF2 with the Temme normalisation sum.
    double bb = 2.0 * (1.0 + x);
    double dd = 1.0 / bb;
    double hh = dd;
    double delh = dd;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double cc = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 1;
    for (; i < kMaxIter; ++i) {
      a -= 2 * i;
      cc = -a * cc / (i + 1.0);
      const double qnew = (q1 - bb * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += cc * qnew;
      bb += 2.0;
      dd = 1.0 / (bb + a * dd);
      delh = (bb * dd - 1.0) * delh;
      hh += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i >= kMaxIter) throw std::runtime_error("bessel_ik: continued fraction CF2 did not converge");
    hh = a1 * hh;
    rkmu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    rk1 = rkmu * (mu + x + 0.5 - hh) * xi;
  }

  BesselIK out{};
  if (series_i) {
    // sum_k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)); every term is positive.
    const double y2 = 0.25 * x * x;
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    double si = term, sip = term * nu;
    for (int k = 1; k <= kMaxIter && term > si * kEps; ++k) {
      term *= y2 / (k * (nu + k));
      si += term;
      sip += term * (nu + 2.0 * k);
    }
    out.i = si;
    out.ip = sip * xi;
  } else {
    const double rkmup = mu * xi * rkmu - rk1;
    const double rimu = xi / (f * rkmu - rkmup);
    out.i = rimu * ril1 / ril;
    out.ip = rimu * rip1 / ril;
  }
  for (int i = 1; i <= nl; ++i) {
    const double rktemp = (mu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
  }
  out.k = rkmu;
  out.kp = nu * xi * rkmu - rk1;
  return out;
}

CheckedValue bessel_k_checked(double nu, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be positive");
  if (x > kBesselKUnderflowX) return {0.0, true};
  return {bessel_ik(std::abs(nu), x).k, false};
}

double bessel_k(double nu, double x) { return bessel_k_checked(nu, x).value; }

double bessel_i(double nu, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_i: x must be positive");
  if (nu >= 0.0) return bessel_ik(nu, x).i;
  const double a = -nu;
  const BesselIK r = bessel_ik(a, x);
  // I_{-a} = I_a + (2/pi) sin(a pi) K_a
  return r.i + 2.0 / std::numbers::pi * std::sin(a * std::numbers::pi) * r.k;
}

void scaled_bessel_k_sequence(double nu, double z, std::vector<double>& out) {
  if (out.empty()) return;
  if (!(z > 0.0)) throw std::domain_error("scaled_bessel_k_sequence: z must be positive");
  if (z > kBesselKUnderflowX) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  // K_{-a} = K_a. K_{nu+1} is evaluated directly: the route through K'_nu
  // cancels catastrophically for small z when nu < 0.
  out[0] = bessel_ik(std::abs(nu), z).k;
  if (out.size() == 1) return;
  out[1] = z * bessel_ik(std::abs(nu + 1.0), z).k;
  const double z2 = z * z;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    out[j + 1] = 2.0 * (nu + static_cast<double>(j)) * out[j] + z2 * out[j - 1];
  }
}

}  // namespace occtime
