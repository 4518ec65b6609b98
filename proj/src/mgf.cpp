#include "occtime/mgf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace occtime {

namespace {

void check_rates(double lambda, double r) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be positive");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("r must be nonnegative");
}

MgfValue base_value(const Diffusion& spec, double lambda, double r, MgfMethod method) {
  MgfValue v;
  v.lambda = lambda;
  v.r = r;
  v.diffusion = spec.name();
  v.params = spec.params();
  v.method = method;
  return v;
}

// E_0 exp(-r A_T); r may be slightly negative (r > -lambda) for the
// finite-difference stencils.
double mgf_at_zero(const Diffusion& spec, double lambda, double r) {
  if (r == 0.0) return 1.0;
  const double d1 = integrate_against_green(spec, lambda, [](double) { return 1.0; }, true);
  const double d2 = integrate_against_green(
      spec, lambda, [&](double y) { return spec.hitting_transform(y, lambda + r); }, true);
  const double a = lambda / (lambda + r);
  return a + (r / (lambda + r)) * (1.0 - lambda * d1) / (1.0 + r * d2);
}

}  // namespace

std::string to_string(MgfMethod m) {
  switch (m) {
    case MgfMethod::closed_form: return "closed_form";
    case MgfMethod::quadrature: return "quadrature";
    case MgfMethod::two_sided: return "two_sided";
  }
  return "unknown";
}

std::string MgfValue::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["diffusion"] = diffusion;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, val] : params) j["params"][k] = val;
  j["method"] = to_string(method);
  j["lambda"] = lambda;
  j["r"] = r;
  if (method == MgfMethod::two_sided) {
    j["q"] = q;
    j["alpha"] = alpha;
    j["side"] = side;
  } else {
    j["x"] = x;
  }
  j["value"] = value;
  return j.dump(indent);
}

MgfValue mgf_exp_time(const Diffusion& spec, double lambda, double r, double x) {
  check_rates(lambda, r);
  MgfValue v = base_value(spec, lambda, r, MgfMethod::quadrature);
  v.x = x;
  const double e0 = mgf_at_zero(spec, lambda, r);
  if (x > 0.0) {
    const double a = lambda / (lambda + r);
    v.value = a - (a - e0) * spec.hitting_transform(x, lambda + r);
  } else if (x < 0.0) {
    // No occupation accrues before the first visit to 0.
    const double f = spec.hitting_transform(x, lambda);
    v.value = (1.0 - f) + f * e0;
  } else {
    v.value = e0;
  }
  return v;
}

MgfValue mgf_bessel_closed(double nu, double beta, double lambda, double r) {
  check_rates(lambda, r);
  if (!(nu > -1.0 && nu < 0.0)) throw ParameterError("nu must lie in (-1, 0)");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("beta must lie in [0, 1]");
  MgfValue v;
  v.lambda = lambda;
  v.r = r;
  v.diffusion = "bessel";
  v.params = {{"nu", nu}, {"beta", beta}};
  v.method = MgfMethod::closed_form;
  // Divide through by (lambda + r)^{nu+1} so only ratios are exponentiated.
  const double rho = std::pow(lambda / (lambda + r), nu + 1.0);
  const double num = beta * rho + (1.0 - beta);
  const double den = beta * rho * (lambda + r) / lambda + (1.0 - beta);
  v.value = num / den;
  return v;
}

MgfValue mgf_two_sided(const Diffusion& spec, double lambda, double r, double q, ZeroSide side, double alpha) {
  check_rates(lambda, r);
  if (!(q >= 0.0) || !std::isfinite(q)) throw ParameterError("q must be nonnegative");
  MgfValue v = base_value(spec, lambda, r, MgfMethod::two_sided);
  v.q = q;
  v.alpha = alpha;
  v.side = side == ZeroSide::plus ? "plus" : "minus";
  const Side d = side == ZeroSide::plus ? Side::left : Side::right;

  const double ps = spec.psi(lambda + q, alpha);
  const double dps = spec.psi_scale_deriv(lambda + q, alpha, d);
  const double ph = spec.phi(lambda + r, alpha);
  const double dph = spec.phi_scale_deriv(lambda + r, alpha, d);
  const double num = lambda / (lambda + q) * ph * dps - lambda / (lambda + r) * ps * dph;
  const double den = ph * dps - ps * dph;
  if (!(den != 0.0) || !std::isfinite(den)) throw std::runtime_error("degenerate two-sided MGF denominator");
  v.value = num / den;
  return v;
}

std::vector<double> central_difference_weights(unsigned derivative, unsigned accuracy) {
  if (derivative == 0) throw ParameterError("derivative order must be positive");
  if (accuracy == 0 || accuracy % 2 != 0) throw ParameterError("accuracy order must be even and positive");
  const unsigned p = (derivative + 1) / 2 - 1 + accuracy / 2;
  const unsigned npts = 2 * p + 1;
  std::vector<double> nodes(npts);
  for (unsigned i = 0; i < npts; ++i) nodes[i] = static_cast<double>(i) - static_cast<double>(p);

  // Fornberg (1988): c[j][m] are weights of node j for the m-th derivative at 0.
  const unsigned M = derivative;
  std::vector<std::vector<double>> c(npts, std::vector<double>(M + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  for (unsigned i = 1; i < npts; ++i) {
    double c2 = 1.0;
    const unsigned mn = std::min(i, M);
    for (unsigned j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (unsigned m = mn; m >= 1; --m)
          c[i][m] = c1 * (m * c[i - 1][m - 1] - nodes[i - 1] * c[i - 1][m]) / c2;
        c[i][0] = -c1 * nodes[i - 1] * c[i - 1][0] / c2;
      }
      for (unsigned m = mn; m >= 1; --m) c[j][m] = (nodes[i] * c[j][m] - m * c[j][m - 1]) / c3;
      c[j][0] = nodes[i] * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(npts);
  for (unsigned i = 0; i < npts; ++i) w[i] = c[i][M];
  return w;
}

std::vector<MgfMomentCheck> mgf_moment_consistency(const Diffusion& spec, double lambda,
                                                   const std::vector<double>& moments) {
  check_rates(lambda, 0.0);
  if (!spec.self_similar())
    throw ParameterError("moment consistency needs a self-similar diffusion (A_T = T A_1 in law)");
  const double h = 1e-3 * lambda;
  std::map<int, double> cache;
  auto value_at = [&](int offset) {
    auto it = cache.find(offset);
    if (it != cache.end()) return it->second;
    const double v = mgf_at_zero(spec, lambda, offset * h);
    cache.emplace(offset, v);
    return v;
  };

  std::vector<MgfMomentCheck> out;
  double fact = 1.0;
  for (unsigned n = 1; n <= moments.size(); ++n) {
    fact *= n;
    const auto w = central_difference_weights(n, 4);
    const int p = static_cast<int>(w.size() / 2);
    double d = 0.0;
    for (int i = -p; i <= p; ++i) d += w[static_cast<std::size_t>(i + p)] * value_at(i);
    d /= std::pow(h, static_cast<double>(n));
    // E(T^n) = n!/lambda^n and A_T = T A_1 with T independent of A_1.
    const double expected = ((n % 2) ? -1.0 : 1.0) * fact / std::pow(lambda, n) * moments[n - 1];
    MgfMomentCheck c;
    c.n = n;
    c.finite_difference = d;
    c.expected = expected;
    c.rel_error = std::abs(d - expected) / std::max(std::abs(expected), 1e-300);
    out.push_back(c);
  }
  return out;
}

}  // namespace occtime
