#pragma once

// One-sample Kolmogorov-Smirnov test against the occupation-time laws.

#include <vector>

#include "occtime/densities.hpp"

namespace occtime {

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

struct KsResult {
  std::size_t n = 0;
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 1.0;
  bool pass_1pct = true;   // p_value >= 0.01
};

/// lattice > 0 declares that samples live on multiples of `lattice`; the
/// reference cdf is then evaluated half a cell beyond each jump (continuity
/// correction). p-values use Stephens' finite-n scaling of sqrt(n) D.
KsResult ks_test(std::vector<double> samples, const OccupationDensity& law, double lattice = 0.0);

}  // namespace occtime
