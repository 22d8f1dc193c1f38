#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference and, on x86,
// an AVX2 variant chosen at runtime. The variants perform the same floating
// point operations per element in the same order (no FMA), so their outputs
// are bit-identical; tests/test_simd.cpp enforces this.

namespace semienv::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Best instruction set supported by this build and CPU.
Isa detected();

/// Instruction set currently used by the dispatching entry points.
Isa active();

/// Override the dispatch choice (tests and benchmarks). Requesting an ISA the
/// CPU lacks falls back to scalar.
void force(Isa isa);

/// Restores the detected ISA on scope exit.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active()) { force(isa); }
  ~ScopedIsa() { force(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

/// out[i] = sum_k weights[k] * in[i + k], summed in ascending k starting from
/// 0.0. Requires in.size() >= out.size() + weights.size() - 1.
void correlate(std::span<const double> in, std::span<const double> weights, std::span<double> out);

/// acc[i] = max(acc[i], x[i]) with std::max semantics (keeps acc on ties).
void max_inplace(std::span<double> acc, std::span<const double> x);

/// y[i] = y[i] + a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace scalar {
void correlate(const double* in, const double* w, std::size_t taps, double* out, std::size_t n);
void max_inplace(double* acc, const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(SEMIENV_HAVE_AVX2)
namespace avx2 {
void correlate(const double* in, const double* w, std::size_t taps, double* out, std::size_t n);
void max_inplace(double* acc, const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace semienv::simd
