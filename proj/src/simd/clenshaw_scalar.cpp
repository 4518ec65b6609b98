#include "occtime/simd.hpp"

namespace occtime {

void clenshaw_batch_scalar(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    const double x2 = 2.0 * t[i];
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = ncoef; k-- > 1;) {
      const double b0 = x2 * b1 - b2 + coef[k];
      b2 = b1;
      b1 = b0;
    }
    out[i] = t[i] * b1 - b2 + coef[0];
  }
}

}  // namespace occtime
