#include <atomic>
#include <cassert>

#include "semienv/simd.hpp"

namespace semienv::simd {

namespace {

Isa probe() {
#if defined(SEMIENV_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) {
    return Isa::avx2;
  }
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detected()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected() {
  static const Isa isa = probe();
  return isa;
}

Isa active() { return current().load(std::memory_order_relaxed); }

void force(Isa isa) {
  if (isa == Isa::avx2 && detected() != Isa::avx2) {
    isa = Isa::scalar;
  }
  current().store(isa, std::memory_order_relaxed);
}

void correlate(std::span<const double> in, std::span<const double> weights, std::span<double> out) {
  if (out.empty()) {
    return;
  }
  assert(!weights.empty());
  assert(in.size() + 1 >= out.size() + weights.size());
#if defined(SEMIENV_HAVE_AVX2)
  if (active() == Isa::avx2) {
    avx2::correlate(in.data(), weights.data(), weights.size(), out.data(), out.size());
    return;
  }
#endif
  scalar::correlate(in.data(), weights.data(), weights.size(), out.data(), out.size());
}

void max_inplace(std::span<double> acc, std::span<const double> x) {
  assert(acc.size() == x.size());
#if defined(SEMIENV_HAVE_AVX2)
  if (active() == Isa::avx2) {
    avx2::max_inplace(acc.data(), x.data(), acc.size());
    return;
  }
#endif
  scalar::max_inplace(acc.data(), x.data(), acc.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
#if defined(SEMIENV_HAVE_AVX2)
  if (active() == Isa::avx2) {
    avx2::axpy(a, x.data(), y.data(), y.size());
    return;
  }
#endif
  scalar::axpy(a, x.data(), y.data(), y.size());
}

}  // namespace semienv::simd
