#include "occtime/ks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace occtime {

double kolmogorov_survival(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 1.18) {
    // Theta-function form of the cdf converges fast for small x.
    const double a = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(-a * m * m);
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const OccupationDensity& law, double lattice) {
  KsResult r;
  r.n = samples.size();
  if (samples.empty()) return r;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double c = 0.5 * lattice;

  // Distinct values with the ecdf just before and at each of them.
  std::vector<double> values, below, at;
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    values.push_back(samples[i]);
    below.push_back(static_cast<double>(i) / n);
    at.push_back(static_cast<double>(j) / n);
    i = j;
  }
  std::vector<double> hi(values.size()), lo(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    hi[k] = values[k] + c;
    lo[k] = values[k] - c;
  }
  const std::vector<double> fh = law.cdf(hi);
  const std::vector<double> fl = law.cdf(lo);
  double d = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    d = std::max(d, std::abs(at[k] - fh[k]));
    d = std::max(d, std::abs(below[k] - fl[k]));
  }
  r.statistic = d;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  r.pass_1pct = r.p_value >= 0.01;
  return r;
}

}  // namespace occtime
