#include <doctest.h>

#include <cmath>
#include <vector>

#include "semienv/error.hpp"
#include "semienv/lattice_kernel.hpp"

using namespace semienv;

namespace {

// e^{-tau} I_k(tau) from the power series, summed in log space.
double bessel_series(int k, double tau) {
  double s = 0.0;
  for (int m = 0; m < 400; ++m) {
    const double lt = (2 * m + k) * std::log(tau / 2) - std::lgamma(m + 1.0) - std::lgamma(m + k + 1.0) - tau;
    s += std::exp(lt);
  }
  return s;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

}  // namespace

TEST_CASE("scaled Bessel values") {
  for (double tau : {0.3, 2.0, 17.0, 60.0}) {
    const auto b = scaled_bessel_i(tau, 25);
    for (int k = 0; k <= 25; ++k) {
      const double ref = std::cyl_bessel_i(static_cast<double>(k), tau) * std::exp(-tau);
      CHECK(b[static_cast<std::size_t>(k)] == doctest::Approx(ref).epsilon(1e-12).scale(1e-300));
      CHECK(b[static_cast<std::size_t>(k)] == doctest::Approx(bessel_series(k, tau)).epsilon(1e-11).scale(1e-300));
    }
  }
  const auto big = scaled_bessel_i(4000.0, 3);
  CHECK(big[0] == doctest::Approx(1.0 / std::sqrt(2 * M_PI * 4000.0)).epsilon(1e-4));
  CHECK(scaled_bessel_i(0.0, 2) == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("drift-diffusion kernel moments") {
  const double dx = 0.05;
  for (double lambda : {-1.5, 0.0, 0.7}) {
    for (double t : {0.001, 0.1, 1.0}) {
      const Stencil s = drift_diffusion_kernel(t, lambda, dx);
      double m0 = 0, m1 = 0, m2 = 0;
      for (std::size_t k = 0; k < s.weights.size(); ++k) {
        const double x = (s.offset + static_cast<double>(k)) * dx;
        CHECK(s.weights[k] >= 0.0);
        m0 += s.weights[k];
        m1 += s.weights[k] * x;
        m2 += s.weights[k] * x * x;
      }
      const double a = lattice_tilt(lambda, dx) * dx;
      CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(m1 - lambda * t) <= 1e-12 * (1.0 + std::abs(lambda * t)));
      CHECK(m2 - m1 * m1 == doctest::Approx(t * std::cosh(a)).epsilon(1e-10));
    }
  }
  CHECK(drift_diffusion_kernel(0.0, 1.0, dx).weights == std::vector<double>{1.0});
  CHECK_THROWS_AS(drift_diffusion_kernel(-1.0, 0.0, dx), UsageError);
}

TEST_CASE("drift-diffusion kernels form a semigroup") {
  const double dx = 0.1, lambda = 0.8;
  const Stencil a = drift_diffusion_kernel(0.2, lambda, dx);
  const Stencil b = drift_diffusion_kernel(0.3, lambda, dx);
  const Stencil c = drift_diffusion_kernel(0.5, lambda, dx);
  const auto ab = convolve(a.weights, b.weights);
  const std::ptrdiff_t off = a.offset + b.offset;
  double worst = 0.0;
  for (std::size_t k = 0; k < ab.size(); ++k) {
    const std::ptrdiff_t idx = off + static_cast<std::ptrdiff_t>(k) - c.offset;
    const double cv = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(c.weights.size())) ? c.weights[static_cast<std::size_t>(idx)] : 0.0;
    worst = std::max(worst, std::abs(ab[k] - cv));
  }
  CHECK(worst < 1e-15);
}

TEST_CASE("holder exponent tends to the continuum value") {
  for (double q : {2.0, 3.0}) {
    const double continuum = (q - 1) * 1.0 / 2.0;
    CHECK(lattice_holder_exponent(1.0, q, 1e-3) == doctest::Approx(continuum).epsilon(1e-5));
  }
  CHECK(lattice_holder_exponent(0.0, 2.0, 0.1) == 0.0);
}

TEST_CASE("poisson weights") {
  const auto w = poisson_weights(2.5, 1e-12);
  double s = 0.0;
  for (double v : w) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t n = 0; n < 6; ++n) {
    const double pmf = std::exp(-2.5) * std::pow(2.5, n) / std::tgamma(n + 1.0);
    CHECK(w[n] == doctest::Approx(pmf).epsilon(1e-11));
  }
  double tail = 0.0;
  for (std::size_t n = w.size(); n < w.size() + 100; ++n) tail += std::exp(-2.5 + n * std::log(2.5) - std::lgamma(n + 1.0));
  CHECK(tail <= 1e-12);
  CHECK(poisson_weights(0.0, 1e-12) == std::vector<double>{1.0});
  CHECK_THROWS_AS(poisson_weights(-1.0, 1e-12), UsageError);
}
