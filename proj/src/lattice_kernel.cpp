#include "semienv/lattice_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "semienv/error.hpp"

namespace semienv {

std::vector<double> scaled_bessel_i(double tau, int k_max) {
  if (k_max < 0) {
    return {};
  }
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (tau == 0.0) {
    out[0] = 1.0;
    return out;
  }
  // Start far enough beyond k_max that the dominant (K_k) contamination has
  // decayed below double precision by the time the recurrence reaches k_max.
  const int start = k_max + std::max(30, static_cast<int>(std::ceil(4.0 * std::sqrt(tau))) + 10);
  std::vector<double> b(static_cast<std::size_t>(start) + 2, 0.0);
  b[static_cast<std::size_t>(start) + 1] = 0.0;
  b[static_cast<std::size_t>(start)] = 1e-300;
  constexpr double kBig = 1e250;
  for (int k = start; k >= 1; --k) {
    const auto uk = static_cast<std::size_t>(k);
    double next = b[uk + 1] + (2.0 * k / tau) * b[uk];
    if (next > kBig) {
      for (std::size_t j = uk; j < b.size(); ++j) {
        b[j] /= kBig;
      }
      next /= kBig;
    }
    b[uk - 1] = next;
  }
  double total = b[0];
  for (std::size_t k = 1; k < b.size(); ++k) {
    total += 2.0 * b[k];
  }
  for (int k = 0; k <= k_max; ++k) {
    out[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)] / total;
  }
  return out;
}

double lattice_tilt(double lambda, double dx) { return std::asinh(lambda * dx) / dx; }

namespace {

// cosh(x) - 1 without cancellation.
double coshm1(double x) {
  const double s = std::sinh(0.5 * x);
  return 2.0 * s * s;
}

}  // namespace

double lattice_holder_exponent(double lambda, double q, double dx) {
  const double a = lattice_tilt(lambda, dx) * dx;
  return coshm1(q * a) / (q * dx * dx) - coshm1(a) / (dx * dx);
}

Stencil drift_diffusion_kernel(double t, double lambda, double dx, double tail_mass) {
  if (t < 0.0) {
    throw UsageError("drift_diffusion_kernel: negative time");
  }
  if (t == 0.0) {
    return Stencil::identity();
  }
  const double tau = t / (dx * dx);
  const double a = lattice_tilt(lambda, dx) * dx;
  const double sd = std::sqrt(tau * std::cosh(a));
  const double mean_nodes = lambda * t / dx;
  const int reach = static_cast<int>(std::ceil(std::abs(mean_nodes) + 12.0 * sd + 40.0));

  const std::vector<double> base = scaled_bessel_i(tau, reach);
  std::vector<double> w(2 * static_cast<std::size_t>(reach) + 1);
  for (int k = -reach; k <= reach; ++k) {
    w[static_cast<std::size_t>(k + reach)] = base[static_cast<std::size_t>(std::abs(k))] * std::exp(a * k);
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;

  // Drop both tails, each carrying at most tail_mass / 2.
  std::size_t lo = 0;
  double cut = 0.0;
  while (lo + 1 < w.size() && cut + w[lo] <= 0.5 * tail_mass) {
    cut += w[lo++];
  }
  std::size_t hi = w.size();
  cut = 0.0;
  while (hi > lo + 1 && cut + w[hi - 1] <= 0.5 * tail_mass) {
    cut += w[--hi];
  }
  Stencil s;
  s.offset = static_cast<std::ptrdiff_t>(lo) - reach;
  s.weights.assign(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
  total = 0.0;
  for (double v : s.weights) total += v;
  for (double& v : s.weights) v /= total;
  return s;
}

std::vector<double> poisson_weights(double mean, double tol) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw UsageError("poisson_weights: mean must be finite and >= 0");
  }
  if (mean == 0.0) {
    return {1.0};
  }
  // Chernoff: P(X >= m) <= e^{-mean} (e mean / m)^m for m > mean.
  const double log_tol = std::log(tol);
  auto log_tail_bound = [&](double m) { return -mean + m * (1.0 + std::log(mean) - std::log(m)); };
  auto n_max = static_cast<std::size_t>(std::ceil(mean));
  while (log_tail_bound(static_cast<double>(n_max + 1)) > log_tol) {
    ++n_max;
  }
  std::vector<double> w(n_max + 1);
  const double log_mean = std::log(mean);
  double total = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    w[n] = std::exp(-mean + dn * log_mean - std::lgamma(dn + 1.0));
    total += w[n];
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace semienv
