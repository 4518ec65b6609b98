#include <immintrin.h>

#include "occtime/simd.hpp"

namespace occtime {

void clenshaw_batch_avx2(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const __m256d x = _mm256_loadu_pd(t + i);
    const __m256d x2 = _mm256_add_pd(x, x);
    __m256d b1 = _mm256_setzero_pd(), b2 = _mm256_setzero_pd();
    for (std::size_t k = ncoef; k-- > 1;) {
      const __m256d b0 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(x2, b1), b2), _mm256_set1_pd(coef[k]));
      b2 = b1;
      b1 = b0;
    }
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(x, b1), b2), _mm256_set1_pd(coef[0])));
  }
  if (i < m) clenshaw_batch_scalar(coef, ncoef, t + i, out + i, m - i);
}

}  // namespace occtime
