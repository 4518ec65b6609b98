#include "occtime/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "occtime/quadrature.hpp"
#include "occtime/simd.hpp"

namespace occtime {

namespace {

constexpr unsigned kPanelNodes = 24;
constexpr unsigned kGeometricPanels = 24;

void check_open_unit(double x) {
  if (!(x > 0.0 && x < 1.0)) throw ParameterError("density argument must lie in (0, 1)");
}

void check_beta_open(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
}

void check_nu(double nu) {
  if (!(nu > -1.0 && nu < 0.0)) throw ParameterError("nu must lie in (-1, 0)");
}

std::vector<double> chebyshev_coefficients(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += values[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (j + 0.5) / static_cast<double>(n));
    c[k] = 2.0 * s / static_cast<double>(n);
  }
  c[0] *= 0.5;
  return c;
}

// Fixed 30-point Gauss-Legendre; the transformed density is smooth on every
// sub-interval between interpolation nodes.
double panel_integral(const Integrand& g, double a, double b) {
  return boost::math::quadrature::gauss<double, 30>::integrate(g, a, b);
}

double to_unit(double u, double lo, double hi) { return std::clamp((2.0 * u - lo - hi) / (hi - lo), -1.0, 1.0); }

}  // namespace

double lamperti_pdf(double nu, double beta, double x) {
  check_nu(nu);
  check_beta_open(beta);
  check_open_unit(x);
  const double s = std::sin(-nu * std::numbers::pi);
  const double c = std::cos(-nu * std::numbers::pi);
  const double y = 1.0 - x;
  const double den = beta * beta * std::pow(y, -2.0 * nu) + (1.0 - beta) * (1.0 - beta) * std::pow(x, -2.0 * nu) +
                     2.0 * beta * (1.0 - beta) * std::pow(x * y, -nu) * c;
  return s / std::numbers::pi * beta * (1.0 - beta) * std::pow(x * y, -nu - 1.0) / den;
}

double skew_bm_pdf(double beta, double x) {
  check_beta_open(beta);
  check_open_unit(x);
  return beta * (1.0 - beta) / (std::numbers::pi * std::sqrt(x * (1.0 - x)) * (beta * beta + x * (1.0 - 2.0 * beta)));
}

double skew_bm_cdf(double beta, double x) {
  check_beta_open(beta);
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double r = beta / (1.0 - beta);
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(x / (x + r * r * (1.0 - x))));
}

double arcsine_pdf(double x) {
  check_open_unit(x);
  return 1.0 / (std::numbers::pi * std::sqrt(x * (1.0 - x)));
}

double arcsine_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
}

double lamperti_left_transformed(double nu, double beta, double u) {
  const double q = -1.0 / nu;
  const double x = std::pow(u, q);
  const double y = 1.0 - x;
  const double s = std::sin(-nu * std::numbers::pi);
  const double c = std::cos(-nu * std::numbers::pi);
  const double yn = std::pow(y, -nu);
  const double den = beta * beta * yn * yn + (1.0 - beta) * (1.0 - beta) * u * u + 2.0 * beta * (1.0 - beta) * c * u * yn;
  return q * s / std::numbers::pi * beta * (1.0 - beta) * yn / y / den;
}

// --- LampertiCdf --------------------------------------------------------------

LampertiCdf::LampertiCdf(double nu, double beta) : nu_(nu), beta_(beta) {
  check_nu(nu);
  check_beta_open(beta);
  q_ = -1.0 / nu;
  u_mid_ = std::pow(0.5, -nu);
  left_ = build_half(beta);
  right_ = build_half(1.0 - beta);
}

std::size_t LampertiCdf::Half::locate(double u) const {
  auto it = std::upper_bound(panels.begin(), panels.end(), u, [](double v, const Panel& p) { return v < p.lo; });
  return it == panels.begin() ? 0 : static_cast<std::size_t>(it - panels.begin()) - 1;
}

LampertiCdf::Half LampertiCdf::build_half(double beta_side) const {
  const double nu = nu_;
  const Integrand g = [nu, beta_side](double u) { return lamperti_left_transformed(nu, beta_side, u); };
  Half h;
  std::vector<double> edges{0.0};
  for (unsigned k = kGeometricPanels; k > 0; --k) edges.push_back(std::ldexp(u_mid_, -static_cast<int>(k)));
  edges.push_back(u_mid_);

  double cum = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], hi = edges[p + 1];
    std::vector<double> nodes(kPanelNodes), vals(kPanelNodes);
    for (unsigned j = 0; j < kPanelNodes; ++j) {
      const double t = std::cos(std::numbers::pi * (j + 0.5) / kPanelNodes);
      nodes[j] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
    }
    // Nodes run from hi to lo; integrate upwards between neighbours.
    double prev = lo, acc = cum;
    for (unsigned j = kPanelNodes; j-- > 0;) {
      acc += panel_integral(g, prev, nodes[j]);
      vals[j] = acc;
      prev = nodes[j];
    }
    cum = acc + panel_integral(g, prev, hi);
    h.panels.push_back({lo, hi, chebyshev_coefficients(vals)});
  }
  h.total = cum;
  return h;
}

double LampertiCdf::eval_half(const Half& h, double u) const {
  const Panel& p = h.panels[h.locate(u)];
  const double t = to_unit(u, p.lo, p.hi);
  double out;
  clenshaw_batch_scalar(p.coef.data(), p.coef.size(), &t, &out, 1);
  return out;
}

double LampertiCdf::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x <= 0.5) return std::clamp(eval_half(left_, std::pow(x, -nu_)), 0.0, 1.0);
  return std::clamp(1.0 - eval_half(right_, std::pow(1.0 - x, -nu_)), 0.0, 1.0);
}

std::vector<double> LampertiCdf::evaluate(const std::vector<double>& x) const {
  std::vector<double> out(x.size());
  // Bucket points by (half, panel) so each bucket is one kernel call.
  const std::size_t np = left_.panels.size();
  std::vector<std::vector<std::size_t>> bucket(2 * np);
  std::vector<double> uval(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (!(xi > 0.0)) {
      out[i] = 0.0;
    } else if (xi >= 1.0) {
      out[i] = 1.0;
    } else if (xi <= 0.5) {
      uval[i] = std::pow(xi, -nu_);
      bucket[left_.locate(uval[i])].push_back(i);
    } else {
      uval[i] = std::pow(1.0 - xi, -nu_);
      bucket[np + right_.locate(uval[i])].push_back(i);
    }
  }
  std::vector<double> t, v;
  for (std::size_t b = 0; b < bucket.size(); ++b) {
    if (bucket[b].empty()) continue;
    const bool right = b >= np;
    const Panel& p = right ? right_.panels[b - np] : left_.panels[b];
    t.resize(bucket[b].size());
    v.resize(bucket[b].size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = to_unit(uval[bucket[b][k]], p.lo, p.hi);
    clenshaw_batch(p.coef.data(), p.coef.size(), t.data(), v.data(), t.size());
    for (std::size_t k = 0; k < t.size(); ++k) out[bucket[b][k]] = std::clamp(right ? 1.0 - v[k] : v[k], 0.0, 1.0);
  }
  return out;
}

// --- OccupationDensity --------------------------------------------------------

std::string to_string(DensityFamily f) {
  switch (f) {
    case DensityFamily::lamperti: return "lamperti";
    case DensityFamily::skew_bm: return "skew_bm";
    case DensityFamily::arcsine: return "arcsine";
  }
  return "unknown";
}

OccupationDensity::OccupationDensity(DensityFamily f, double nu, double beta) : family_(f), nu_(nu), beta_(beta) {}

OccupationDensity OccupationDensity::lamperti(double nu, double beta) {
  OccupationDensity d(DensityFamily::lamperti, nu, beta);
  d.lamperti_cdf_ = std::make_shared<const LampertiCdf>(nu, beta);
  return d;
}

OccupationDensity OccupationDensity::skew_bm(double beta) {
  check_beta_open(beta);
  return OccupationDensity(DensityFamily::skew_bm, -0.5, beta);
}

OccupationDensity OccupationDensity::arcsine() { return OccupationDensity(DensityFamily::arcsine, -0.5, 0.5); }

ParamMap OccupationDensity::params() const {
  switch (family_) {
    case DensityFamily::lamperti: return {{"nu", nu_}, {"beta", beta_}};
    case DensityFamily::skew_bm: return {{"beta", beta_}};
    case DensityFamily::arcsine: return {};
  }
  return {};
}

double OccupationDensity::pdf(double x) const {
  switch (family_) {
    case DensityFamily::lamperti: return lamperti_pdf(nu_, beta_, x);
    case DensityFamily::skew_bm: return skew_bm_pdf(beta_, x);
    case DensityFamily::arcsine: return arcsine_pdf(x);
  }
  return 0.0;
}

double OccupationDensity::cdf(double x) const {
  switch (family_) {
    case DensityFamily::lamperti: return (*lamperti_cdf_)(x);
    case DensityFamily::skew_bm: return skew_bm_cdf(beta_, x);
    case DensityFamily::arcsine: return arcsine_cdf(x);
  }
  return 0.0;
}

std::vector<double> OccupationDensity::cdf(const std::vector<double>& x) const {
  if (family_ == DensityFamily::lamperti) return lamperti_cdf_->evaluate(x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = cdf(x[i]);
  return out;
}

OccupationDensity occupation_law(const Diffusion& spec) {
  if (auto b = dynamic_cast<const SkewBessel*>(&spec)) return OccupationDensity::lamperti(b->nu(), b->beta());
  if (auto s = dynamic_cast<const SkewBM*>(&spec)) {
    if (s->beta() == 0.5) return OccupationDensity::arcsine();
    return OccupationDensity::skew_bm(s->beta());
  }
  if (auto o = dynamic_cast<const OscillatingBM*>(&spec)) {
    if (o->sigma_plus() == o->sigma_minus()) return OccupationDensity::arcsine();
    return OccupationDensity::skew_bm(o->equivalent_beta());
  }
  throw ParameterError("no closed-form occupation law for diffusion '" + spec.name() + "'");
}

double density_moment_oracle(const OccupationDensity& d, unsigned n, double abs_tol) {
  if (n > kMaxOracleOrder) throw ParameterError("oracle order must not exceed " + std::to_string(kMaxOracleOrder));
  const double nu = d.nu(), beta = d.beta();
  const double q = -1.0 / nu;
  const double u_mid = std::pow(0.5, -nu);
  const double nn = static_cast<double>(n);
  const Integrand left = [&](double u) {
    return std::pow(std::pow(u, q), nn) * lamperti_left_transformed(nu, beta, u);
  };
  const Integrand right = [&](double v) {
    return std::pow(1.0 - std::pow(v, q), nn) * lamperti_left_transformed(nu, 1.0 - beta, v);
  };
  // Geometric panels towards 0 isolate the finitely smooth u^q terms; two
  // Gauss orders give the error estimate.
  double fine = 0.0, coarse = 0.0;
  for (const Integrand* f : {&left, &right}) {
    double hi = u_mid;
    for (unsigned k = 0; k <= 2 * kGeometricPanels; ++k) {
      const double lo = k == 2 * kGeometricPanels ? 0.0 : 0.5 * hi;
      fine += boost::math::quadrature::gauss<double, 30>::integrate(*f, lo, hi);
      coarse += boost::math::quadrature::gauss<double, 20>::integrate(*f, lo, hi);
      hi = lo;
    }
  }
  const QuadResult total{fine, std::abs(fine - coarse), true};
  return require(total, abs_tol, "density moment oracle");
}

}  // namespace occtime
