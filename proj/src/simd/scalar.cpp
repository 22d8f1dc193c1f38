#include "semienv/simd.hpp"

namespace semienv::simd::scalar {

void correlate(const double* in, const double* w, std::size_t taps, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = in + i;
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) {
      acc += w[k] * src[k];
    }
    out[i] = acc;
  }
}

void max_inplace(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] = (acc[i] < x[i]) ? x[i] : acc[i];
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = y[i] + a * x[i];
  }
}

}  // namespace semienv::simd::scalar
