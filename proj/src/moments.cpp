#include "occtime/moments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "occtime/format.hpp"

namespace occtime {

namespace {

void check_order_cap(unsigned N) {
  if (N < 1 || N > kMaxMomentOrder)
    throw ParameterError("moment order must lie in [1, " + std::to_string(kMaxMomentOrder) + "]");
}

template <class T>
T pow_int(const T& x, unsigned n) {
  T r = 1;
  for (unsigned i = 0; i < n; ++i) r *= x;
  return r;
}

template <class T>
T skew_bm_moment_impl(const T& beta, unsigned n) {
  T s = 0;
  for (unsigned k = 0; k < n; ++k) {
    const T c = T(binomial(n - 1 + k, k));
    s += c * pow_int(beta, n - k) / T(BigInt(1) << (n + k - 1));
  }
  return s;
}

template <>
double skew_bm_moment_impl<double>(const double& beta, unsigned n) {
  double s = 0.0;
  for (unsigned k = 0; k < n; ++k)
    s += binomial(n - 1 + k, k).convert_to<double>() * std::pow(beta, n - k) / std::ldexp(1.0, n + k - 1);
  return s;
}

MomentTable constant_table(const std::string& name, ParamMap params, double v, unsigned N) {
  MomentTable t;
  t.diffusion = name;
  t.params = std::move(params);
  t.method = MomentMethod::closed_form;
  t.values.assign(N, v);
  t.exact_values.assign(N, BigRational(static_cast<int>(v)));
  t.degenerate = true;
  return t;
}

void fill_from_exact(MomentTable& t, std::vector<BigRational> v) {
  t.values.clear();
  for (const auto& q : v) t.values.push_back(to_double(q));
  t.exact_values = std::move(v);
}

// Degenerate skewness at the ends of [0, 1]; nullopt inside (0, 1).
std::optional<int> degenerate_beta(double beta) {
  if (beta == 0.0) return 0;
  if (beta == 1.0) return 1;
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in [0, 1]");
  return std::nullopt;
}

void check_nu(double nu) {
  if (!(nu > -1.0 && nu < 0.0)) throw ParameterError("nu must lie in (-1, 0)");
}

}  // namespace

std::string to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::recursion: return "recursion";
    case MomentMethod::closed_form: return "closed_form";
    case MomentMethod::quadrature: return "quadrature";
    case MomentMethod::monte_carlo: return "monte_carlo";
    case MomentMethod::laplace_inversion: return "laplace_inversion";
  }
  return "unknown";
}

std::string MomentTable::to_csv() const {
  std::ostringstream os;
  os << "n,value,method";
  for (const auto& [k, v] : params) os << ',' << k;
  if (lambda) os << ",lambda";
  if (!std_errors.empty()) os << ",std_error";
  os << '\n';
  for (unsigned n = 1; n <= max_order(); ++n) {
    os << n << ',' << (exact() ? format_rational(exact_values[n - 1]) : format_double(values[n - 1])) << ','
       << to_string(method);
    for (const auto& [k, v] : params) os << ',' << format_double(v);
    if (lambda) os << ',' << format_double(*lambda);
    if (!std_errors.empty()) os << ',' << format_double(std_errors[n - 1]);
    os << '\n';
  }
  return os.str();
}

std::string MomentTable::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["diffusion"] = diffusion;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) j["params"][k] = v;
  j["method"] = to_string(method);
  j["domain"] = lambda ? "laplace" : "time";
  if (lambda) j["lambda"] = *lambda;
  j["exact"] = exact();
  j["degenerate"] = degenerate;
  auto rows = nlohmann::ordered_json::array();
  for (unsigned n = 1; n <= max_order(); ++n) {
    nlohmann::ordered_json r;
    r["n"] = n;
    if (exact()) r["value"] = format_rational(exact_values[n - 1]);
    else r["value"] = values[n - 1];
    r["value_double"] = values[n - 1];
    if (!std_errors.empty()) r["std_error"] = std_errors[n - 1];
    rows.push_back(r);
  }
  j["values"] = rows;
  return j.dump(indent);
}

bool hausdorff_moment_condition(const std::vector<double>& values, double tol) {
  std::vector<double> m{1.0};
  m.insert(m.end(), values.begin(), values.end());
  std::vector<double> d = m;
  for (std::size_t k = 0; k < m.size(); ++k) {
    for (double x : d)
      if (x < -tol) return false;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i] - d[i + 1];
    d.pop_back();
  }
  return true;
}

bool hausdorff_moment_condition(const std::vector<BigRational>& values) {
  std::vector<BigRational> d{BigRational(1)};
  d.insert(d.end(), values.begin(), values.end());
  while (!d.empty()) {
    for (const auto& x : d)
      if (x < 0) return false;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i] - d[i + 1];
    d.pop_back();
  }
  return true;
}

// ---------------------------------------------------------------------------

BigRational arcsine_moment(unsigned n) { return BigRational(binomial(2 * n, n), BigInt(1) << (2 * n)); }

MomentTable bm_moments(unsigned N) {
  check_order_cap(N);
  MomentTable t;
  t.diffusion = "bm";
  t.method = MomentMethod::closed_form;
  std::vector<BigRational> v;
  for (unsigned n = 1; n <= N; ++n) v.push_back(arcsine_moment(n));
  fill_from_exact(t, std::move(v));
  return t;
}

double skew_bm_moment(double beta, unsigned n) { return skew_bm_moment_impl<double>(beta, n); }
BigRational skew_bm_moment(const BigRational& beta, unsigned n) { return skew_bm_moment_impl<BigRational>(beta, n); }

MomentTable skew_bm_moments(double beta, unsigned N) {
  check_order_cap(N);
  if (auto d = degenerate_beta(beta)) return constant_table("skew-bm", {{"beta", beta}}, *d, N);
  MomentTable t;
  t.diffusion = "skew-bm";
  t.params = {{"beta", beta}};
  t.method = MomentMethod::closed_form;
  for (unsigned n = 1; n <= N; ++n) t.values.push_back(skew_bm_moment(beta, n));
  return t;
}

MomentTable skew_bm_moments(const BigRational& beta, unsigned N) {
  check_order_cap(N);
  const double bd = to_double(beta);
  if (beta < 0 || beta > 1) throw ParameterError("beta must lie in [0, 1]");
  if (beta == 0 || beta == 1) return constant_table("skew-bm", {{"beta", bd}}, bd, N);
  MomentTable t;
  t.diffusion = "skew-bm";
  t.params = {{"beta", bd}};
  t.method = MomentMethod::closed_form;
  std::vector<BigRational> v;
  for (unsigned n = 1; n <= N; ++n) v.push_back(skew_bm_moment(beta, n));
  fill_from_exact(t, std::move(v));
  return t;
}

MomentTable oscillating_moments(double sigma_plus, double sigma_minus, unsigned N) {
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0)) throw ParameterError("sigma_plus and sigma_minus must be positive");
  MomentTable t = skew_bm_moments(sigma_minus / (sigma_plus + sigma_minus), N);
  t.diffusion = "oscillating";
  t.params = {{"sigma_plus", sigma_plus}, {"sigma_minus", sigma_minus}};
  return t;
}

MomentTable oscillating_moments(const BigRational& sigma_plus, const BigRational& sigma_minus, unsigned N) {
  if (sigma_plus <= 0 || sigma_minus <= 0) throw ParameterError("sigma_plus and sigma_minus must be positive");
  MomentTable t = skew_bm_moments(BigRational(sigma_minus / (sigma_plus + sigma_minus)), N);
  t.diffusion = "oscillating";
  t.params = {{"sigma_plus", to_double(sigma_plus)}, {"sigma_minus", to_double(sigma_minus)}};
  return t;
}

namespace {

template <class T>
T spider_beta(const std::vector<T>& p, const std::set<unsigned>& rays) {
  if (p.empty()) throw ParameterError("spider needs at least one ray probability");
  T total = 0;
  for (const auto& x : p) {
    if (x < 0) throw ParameterError("ray probabilities must be nonnegative");
    total += x;
  }
  using std::abs;
  if (abs(T(total - 1)) > T(1e-12)) throw ParameterError("ray probabilities must sum to 1");
  T beta = 0;
  for (unsigned r : rays) {
    if (r < 1 || r > p.size()) throw ParameterError("ray index " + std::to_string(r) + " out of range");
    beta += p[r - 1];
  }
  return beta;
}

ParamMap spider_params(const std::vector<double>& p, const std::set<unsigned>& rays) {
  ParamMap m;
  for (std::size_t i = 0; i < p.size(); ++i) m["p" + std::to_string(i + 1)] = p[i];
  double beta = 0.0;
  for (unsigned r : rays) beta += p[r - 1];
  m["beta"] = beta;
  return m;
}

}  // namespace

MomentTable spider_moments(const std::vector<double>& p, const std::set<unsigned>& rays, unsigned N) {
  double beta = spider_beta(p, rays);
  if (rays.size() == p.size()) beta = 1.0;
  if (rays.empty()) beta = 0.0;
  MomentTable t = skew_bm_moments(std::clamp(beta, 0.0, 1.0), N);
  t.diffusion = "spider";
  t.params = spider_params(p, rays);
  return t;
}

MomentTable spider_moments(const std::vector<BigRational>& p, const std::set<unsigned>& rays, unsigned N) {
  std::vector<double> pd;
  for (const auto& x : p) pd.push_back(to_double(x));
  BigRational total = 0;
  for (const auto& x : p) total += x;
  if (total != 1) throw ParameterError("ray probabilities must sum to 1");
  const BigRational beta = spider_beta(p, rays);
  MomentTable t = skew_bm_moments(beta, N);
  t.diffusion = "spider";
  t.params = spider_params(pd, rays);
  return t;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
std::vector<T> bessel_recursive_impl(const T& nu, const T& beta, unsigned N) {
  std::vector<T> c(N);  // c[k] = C(nu+k-1, k)
  for (unsigned k = 0; k < N; ++k) c[k] = gen_binomial(T(nu + k - 1), k);
  std::vector<T> e(N + 1);
  for (unsigned n = 1; n <= N; ++n) {
    T v = beta * gen_binomial(T(nu + n - 1), n - 1);
    for (unsigned k = 1; k < n; ++k) v -= beta * c[k] * e[n - k];
    e[n] = v;
  }
  return {e.begin() + 1, e.end()};
}

}  // namespace

std::vector<double> bessel_recursive_values(double nu, double beta, unsigned N) {
  return bessel_recursive_impl<double>(nu, beta, N);
}

std::vector<BigRational> bessel_recursive_values(const BigRational& nu, const BigRational& beta, unsigned N) {
  return bessel_recursive_impl<BigRational>(nu, beta, N);
}

std::vector<BigRational> bessel_closed_values(const BigRational& nu, const BigRational& beta, unsigned N) {
  const auto& st = StirlingCache::instance();
  std::vector<BigRational> out;
  std::vector<BigRational> nu_pow{BigRational(1)}, beta_pow{BigRational(1)};
  for (unsigned i = 1; i <= N + 1; ++i) {
    nu_pow.push_back(nu_pow.back() * nu);
    beta_pow.push_back(beta_pow.back() * beta);
  }
  std::vector<BigInt> fact{BigInt(1)};
  for (unsigned i = 1; i <= N; ++i) fact.push_back(fact.back() * i);
  for (unsigned n = 1; n <= N; ++n) {
    BigRational s = 0;
    for (unsigned k = 0; k < n; ++k) {
      BigRational inner = 0;
      for (unsigned j = 0; j <= k; ++j) {
        BigRational term = BigRational(fact[j] * st.second_kind(k + 1, j + 1)) * beta_pow[j + 1];
        if (j % 2 == 1) term = -term;
        inner += term;
      }
      s += BigRational(st.first_kind(n, k + 1)) * nu_pow[k] * inner;
    }
    out.push_back(s / BigRational(fact[n - 1]));
  }
  return out;
}

std::vector<double> bessel_closed_values(double nu, double beta, unsigned N) {
  std::vector<double> out;
  for (const auto& q : bessel_closed_values(to_rational(nu), to_rational(beta), N)) out.push_back(to_double(q));
  return out;
}

namespace {

MomentTable bessel_table(double nu, double beta, MomentMethod method) {
  MomentTable t;
  t.diffusion = "bessel";
  t.params = {{"nu", nu}, {"beta", beta}};
  t.method = method;
  return t;
}

}  // namespace

MomentTable bessel_moments_recursive(double nu, double beta, unsigned N) {
  check_order_cap(N);
  check_nu(nu);
  if (auto d = degenerate_beta(beta)) return constant_table("bessel", {{"nu", nu}, {"beta", beta}}, *d, N);
  MomentTable t = bessel_table(nu, beta, MomentMethod::recursion);
  t.values = bessel_recursive_values(nu, beta, N);
  return t;
}

MomentTable bessel_moments_recursive(const BigRational& nu, const BigRational& beta, unsigned N) {
  check_order_cap(N);
  check_nu(to_double(nu));
  if (auto d = degenerate_beta(to_double(beta)))
    return constant_table("bessel", {{"nu", to_double(nu)}, {"beta", to_double(beta)}}, *d, N);
  MomentTable t = bessel_table(to_double(nu), to_double(beta), MomentMethod::recursion);
  fill_from_exact(t, bessel_recursive_values(nu, beta, N));
  return t;
}

MomentTable bessel_moments_closed(double nu, double beta, unsigned N) {
  check_order_cap(N);
  check_nu(nu);
  if (auto d = degenerate_beta(beta)) return constant_table("bessel", {{"nu", nu}, {"beta", beta}}, *d, N);
  MomentTable t = bessel_table(nu, beta, MomentMethod::closed_form);
  t.values = bessel_closed_values(nu, beta, N);
  return t;
}

MomentTable bessel_moments_closed(const BigRational& nu, const BigRational& beta, unsigned N) {
  check_order_cap(N);
  check_nu(to_double(nu));
  if (auto d = degenerate_beta(to_double(beta)))
    return constant_table("bessel", {{"nu", to_double(nu)}, {"beta", to_double(beta)}}, *d, N);
  MomentTable t = bessel_table(to_double(nu), to_double(beta), MomentMethod::closed_form);
  fill_from_exact(t, bessel_closed_values(nu, beta, N));
  return t;
}

double bessel_dk(double nu, double beta, unsigned k) { return beta * gen_binomial(nu + k - 1.0, k); }

// ---------------------------------------------------------------------------

namespace {

void check_sticky(double gamma, double lambda) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be nonnegative");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be positive");
}

}  // namespace

double sticky_h(double gamma, double lambda) {
  check_sticky(gamma, lambda);
  return 1.0 / (2.0 + gamma * std::sqrt(2.0 * lambda));
}

BigRational sticky_t(unsigned n) {
  if (n == 0) throw ParameterError("T_n is defined for n >= 1");
  return BigRational(binomial(2 * n, n), (BigInt(1) << (2 * n)) * (2 * n - 1));
}

double sticky_u(double gamma, double lambda, unsigned n) {
  if (n == 0) return 1.0;
  return skew_bm_moment(sticky_h(gamma, lambda), n);
}

double sticky_bhat(double gamma, double lambda, unsigned n) {
  // n!/lambda^{n+1} U_n, computed in logs so tiny lambda does not overflow early.
  const double u = sticky_u(gamma, lambda, n);
  return std::exp(std::lgamma(n + 1.0) - (n + 1.0) * std::log(lambda)) * u;
}

double sticky_dk(double gamma, double lambda, unsigned k, bool include_atom) {
  if (k == 0) throw ParameterError("D_k is defined for k >= 1");
  const double h = sticky_h(gamma, lambda);
  const double t = to_double(sticky_t(k));
  if (k == 1 && include_atom) return -h / 2.0 * (1.0 + 2.0 * gamma * std::sqrt(2.0 * lambda));
  return -h * t;
}

MomentTable sticky_moments(double gamma, double lambda, unsigned N) {
  check_order_cap(N);
  check_sticky(gamma, lambda);
  MomentTable t;
  t.diffusion = "sticky";
  t.params = {{"gamma", gamma}};
  t.method = MomentMethod::closed_form;
  t.lambda = lambda;
  for (unsigned n = 1; n <= N; ++n) t.values.push_back(sticky_u(gamma, lambda, n));
  return t;
}

// ---------------------------------------------------------------------------

double generic_dk(const Diffusion& spec, double lambda, unsigned k, bool include_atom) {
  if (k == 0) throw ParameterError("D_k is defined for k >= 1");
  if (k - 1 > spec.max_hitting_derivative())
    throw ParameterError(spec.name() + " provides hitting-transform derivatives only up to order " +
                         std::to_string(spec.max_hitting_derivative()));
  auto h = [&](double y) { return spec.hitting_transform_deriv(y, lambda, k - 1); };
  const double integral = integrate_against_green(spec, lambda, h, true, include_atom);
  // (-lambda)^k / (k-1)!
  const double scale = std::exp(k * std::log(lambda) - std::lgamma(static_cast<double>(k)));
  return (k % 2 == 1 ? -scale : scale) * integral;
}

GenericMomentResult generic_laplace_moments(const Diffusion& spec, double lambda, unsigned N, bool include_atom) {
  check_order_cap(N);
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  GenericMomentResult r;
  const double g1 = integrate_against_green(spec, lambda, [](double) { return 1.0; }, true, include_atom);
  for (unsigned k = 1; k < N; ++k) r.dk.push_back(generic_dk(spec, lambda, k, include_atom));
  std::vector<double> u(N + 1);
  u[1] = lambda * g1;
  for (unsigned n = 2; n <= N; ++n) {
    double v = u[1];
    for (unsigned k = 1; k < n; ++k) v += (1.0 - u[n - k]) * r.dk[k - 1];
    u[n] = v;
  }
  r.table.diffusion = spec.name();
  r.table.params = spec.params();
  r.table.method = MomentMethod::quadrature;
  if (!spec.self_similar()) r.table.lambda = lambda;
  for (unsigned n = 1; n <= N; ++n) {
    r.table.values.push_back(u[n]);
    r.ahat.push_back(std::exp(std::lgamma(n + 1.0) - (n + 1.0) * std::log(lambda)) * u[n]);
  }
  return r;
}

}  // namespace occtime
