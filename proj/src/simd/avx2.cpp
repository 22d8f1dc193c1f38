#include <immintrin.h>

#include "semienv/simd.hpp"

namespace semienv::simd::avx2 {

void correlate(const double* in, const double* w, std::size_t taps, double* out, std::size_t n) {
  std::size_t i = 0;
  // 16 outputs per pass: four independent accumulators hide the add latency.
  for (; i + 16 <= n; i += 16) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    const double* src = in + i;
    for (std::size_t k = 0; k < taps; ++k) {
      const __m256d wk = _mm256_set1_pd(w[k]);
      a0 = _mm256_add_pd(a0, _mm256_mul_pd(wk, _mm256_loadu_pd(src + k)));
      a1 = _mm256_add_pd(a1, _mm256_mul_pd(wk, _mm256_loadu_pd(src + k + 4)));
      a2 = _mm256_add_pd(a2, _mm256_mul_pd(wk, _mm256_loadu_pd(src + k + 8)));
      a3 = _mm256_add_pd(a3, _mm256_mul_pd(wk, _mm256_loadu_pd(src + k + 12)));
    }
    _mm256_storeu_pd(out + i, a0);
    _mm256_storeu_pd(out + i + 4, a1);
    _mm256_storeu_pd(out + i + 8, a2);
    _mm256_storeu_pd(out + i + 12, a3);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d a0 = _mm256_setzero_pd();
    const double* src = in + i;
    for (std::size_t k = 0; k < taps; ++k) {
      a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_set1_pd(w[k]), _mm256_loadu_pd(src + k)));
    }
    _mm256_storeu_pd(out + i, a0);
  }
  if (i < n) {
    scalar::correlate(in + i, w, taps, out + i, n - i);
  }
}

void max_inplace(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(acc + i);
    const __m256d b = _mm256_loadu_pd(x + i);
    // maxpd returns its second operand unless the first is strictly greater,
    // which matches (a < b) ? b : a.
    _mm256_storeu_pd(acc + i, _mm256_max_pd(b, a));
  }
  if (i < n) {
    scalar::max_inplace(acc + i, x + i, n - i);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  if (i < n) {
    scalar::axpy(a, x + i, y + i, n - i);
  }
}

}  // namespace semienv::simd::avx2
