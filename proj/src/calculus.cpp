#include "semienv/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "semienv/error.hpp"
#include "semienv/initial_data.hpp"

namespace semienv {

double interior_norm(const GridFunction& f, const PNorm& norm, double margin) {
  return lp_norm(f, norm, interior(f.grid(), margin));
}

GridFunction probe_envelope(const KernelFamily& family, double t, const GridFunction& f, const EnvelopeParams& params) {
  if (t < 0.0) {
    throw UsageError("probe_envelope: t must be >= 0");
  }
  return dyadic_iterate(family, t, params.probe_level, f, params.series);
}

GridFunction short_time_envelope(const KernelFamily& family, double h, const GridFunction& f,
                                 const EnvelopeParams& params) {
  return dyadic_iterate(family, h, 2, f, params.series);
}

std::vector<double> halving_schedule(double h0, int halvings) {
  if (!(h0 > 0.0) || halvings < 0) {
    throw UsageError("halving schedule needs h0 > 0 and halvings >= 0");
  }
  std::vector<double> hs;
  for (int k = 0; k <= halvings; ++k) hs.push_back(std::ldexp(h0, -k));
  return hs;
}

GridFunction generator_quotient(const KernelFamily& family, const GridFunction& f, double h,
                                const EnvelopeParams& params) {
  GridFunction q = short_time_envelope(family, h, f, params) - f;
  q *= 1.0 / h;
  return q;
}

GeneratorEstimate generator_fd(const KernelFamily& family, const GridFunction& f, double h0, int k_steps,
                               const EnvelopeParams& params, const PNorm& norm) {
  if (k_steps < 1) {
    throw UsageError("generator_fd needs at least one halving");
  }
  GeneratorEstimate est;
  est.h_schedule = halving_schedule(h0, k_steps);
  const GridFunction bf = sup_generator(family, f);
  for (double h : est.h_schedule) {
    GridFunction q = generator_quotient(family, f, h, params);
    est.errors_vs_B.push_back(interior_norm(q - bf, norm, params.boundary_margin));
    est.quotients.push_back(std::move(q));
  }
  const std::size_t n = est.quotients.size();
  est.extrapolated = axpby(2.0, est.quotients[n - 1], -1.0, est.quotients[n - 2]);
  est.extrapolated_error = interior_norm(est.extrapolated - bf, norm, params.boundary_margin);
  est.strictly_decreasing = true;
  for (std::size_t k = 1; k < n; ++k) {
    if (!(est.errors_vs_B[k] < est.errors_vs_B[k - 1])) est.strictly_decreasing = false;
  }
  return est;
}

namespace {

double max_excess(const GridFunction& a, const GridFunction& b) { return pointwise_leq(a, b, 0.0).worst; }

}  // namespace

DerivativeProbe directional_derivative(const KernelFamily& family, double t, const GridFunction& x,
                                       const GridFunction& y, const std::vector<double>& h_schedule,
                                       const EnvelopeParams& params, const PNorm& norm) {
  require_same_grid(x, y);
  if (h_schedule.empty()) {
    throw UsageError("directional_derivative needs a nonempty h schedule");
  }
  for (std::size_t k = 1; k < h_schedule.size(); ++k) {
    if (!(h_schedule[k] < h_schedule[k - 1])) throw UsageError("h schedule must decrease");
  }
  DerivativeProbe probe;
  probe.t = t;
  probe.x = x;
  probe.y = y;
  probe.plus = y;
  probe.minus = y;
  probe.worst_violation = -std::numeric_limits<double>::infinity();
  if (t == 0.0) {
    probe.worst_violation = 0.0;
    return probe;
  }
  const GridFunction base = probe_envelope(family, t, x, params);
  std::optional<GridFunction> prev_plus, prev_minus;
  for (double h : h_schedule) {
    GridFunction plus = probe_envelope(family, t, axpby(1.0, x, h, y), params) - base;
    plus *= 1.0 / h;
    GridFunction minus = base - probe_envelope(family, t, axpby(1.0, x, -h, y), params);
    minus *= 1.0 / h;
    probe.worst_violation = std::max(probe.worst_violation, max_excess(minus, plus));
    if (prev_plus) {
      probe.worst_violation = std::max(probe.worst_violation, max_excess(plus, *prev_plus));
      probe.worst_violation = std::max(probe.worst_violation, max_excess(*prev_minus, minus));
    }
    prev_plus = std::move(plus);
    prev_minus = std::move(minus);
  }
  probe.plus = std::move(*prev_plus);
  probe.minus = std::move(*prev_minus);
  probe.gap = interior_norm(probe.plus - probe.minus, norm, params.boundary_margin);
  probe.quotient_monotone = probe.worst_violation <= 1e-9;
  return probe;
}

DerivativeIdentityReport derivative_identity_check(const KernelFamily& family, double t, const GridFunction& f,
                                                   const std::vector<double>& h_schedule,
                                                   const EnvelopeParams& params, const PNorm& norm,
                                                   double tolerance) {
  if (h_schedule.empty()) {
    throw UsageError("derivative_identity_check needs a nonempty h schedule");
  }
  DerivativeIdentityReport rep;
  rep.t = t;
  rep.tolerance = tolerance;
  const double h = h_schedule.back();
  const GridFunction g = probe_envelope(family, t, f, params);
  rep.forward = generator_quotient(family, g, h, params);
  const GridFunction bf = sup_generator(family, f);
  DerivativeProbe probe = directional_derivative(family, t, f, bf, h_schedule, params, norm);
  rep.plus = std::move(probe.plus);
  rep.minus = std::move(probe.minus);
  const double m = params.boundary_margin;
  const double scale = std::max(interior_norm(rep.forward, norm, m), 1e-14);
  rep.gap_forward_plus = interior_norm(rep.forward - rep.plus, norm, m) / scale;
  rep.gap_forward_minus = interior_norm(rep.forward - rep.minus, norm, m) / scale;
  rep.gap_plus_minus = interior_norm(rep.plus - rep.minus, norm, m) / scale;
  rep.pass = rep.gap_forward_plus <= tolerance && rep.gap_forward_minus <= tolerance &&
             rep.gap_plus_minus <= tolerance;
  return rep;
}

double integral_identity_check(const KernelFamily& family, double t, const GridFunction& f, int quad_nodes, double h,
                               const EnvelopeParams& params, const PNorm& norm) {
  if (quad_nodes < 3 || quad_nodes % 2 == 0) {
    throw UsageError("Simpson quadrature needs an odd number of nodes >= 3");
  }
  if (!(h > 0.0)) {
    throw UsageError("integral_identity_check: h must be > 0");
  }
  const double m = params.boundary_margin;
  const GridFunction lhs = probe_envelope(family, t, f, params) - f;
  const double lhs_norm = interior_norm(lhs, norm, m);
  if (lhs_norm < 1e-12) {
    return 0.0;
  }
  const GridFunction bf = sup_generator(family, f);
  const GridFunction shifted = axpby(1.0, f, h, bf);
  const int intervals = quad_nodes - 1;
  const double ds = t / intervals;
  GridFunction integral(f.grid());
  for (int k = 0; k <= intervals; ++k) {
    const double s = k == intervals ? t : k * ds;
    GridFunction integrand = bf;
    if (s > 0.0) {
      integrand = probe_envelope(family, s, shifted, params) - probe_envelope(family, s, f, params);
      integrand *= 1.0 / h;
    }
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    integral += (w * ds / 3.0) * integrand;
  }
  return interior_norm(lhs - integral, norm, m) / lhs_norm;
}

LipschitzReport lipschitz_probe(const KernelFamily& family, double t, const GridFunction& x0, double r, int samples,
                                const EnvelopeParams& params, const PNorm& norm, std::uint64_t seed) {
  if (!(r > 0.0) || samples < 2) {
    throw UsageError("lipschitz_probe needs r > 0 and samples >= 2");
  }
  const Grid& grid = x0.grid();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Random directions of norm at most r, supported away from the boundary.
  const double support = 0.4 * grid.length();
  const double centre = 0.5 * (grid.lower + grid.upper);
  auto direction = [&](double radius) {
    GridFunction u = random_smooth_bump(grid, rng, support, centre);
    const double n = lp_norm(u, norm);
    u *= radius * unit(rng) / n;
    return u;
  };

  LipschitzReport rep;
  for (int k = 0; k < samples; ++k) {
    const GridFunction y = x0 + direction(r);
    const GridFunction z = x0 + direction(r);
    const double d = lp_norm(y - z, norm);
    if (d < 1e-14) continue;
    const double num = lp_norm(probe_envelope(family, t, y, params) - probe_envelope(family, t, z, params), norm);
    rep.L = std::max(rep.L, num / d);
    ++rep.pairs_used;
  }

  const GridFunction zero(grid);
  const GridFunction s0 = probe_envelope(family, t, zero, params);
  auto T = [&](const GridFunction& u) { return probe_envelope(family, t, u, params) - s0; };
  std::vector<GridFunction> us;
  std::vector<double> tu;
  for (int k = 0; k < samples; ++k) {
    GridFunction u = direction(r);
    const double n = lp_norm(u, norm);
    if (n < 1e-14) continue;
    const GridFunction edge = (r / n) * u;
    rep.b = std::max(rep.b, lp_norm(T(edge), norm));
    rep.b = std::max(rep.b, lp_norm(T(-1.0 * edge), norm));
    tu.push_back(lp_norm(T(u), norm));
    us.push_back(std::move(u));
  }
  rep.lemma_worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double excess = tu[k] - (2.0 * rep.b / r) * lp_norm(us[k], norm);
    rep.lemma_worst = std::max(rep.lemma_worst, excess);
  }
  rep.lemma_holds = rep.lemma_worst <= 1e-12 * (1.0 + rep.b);
  return rep;
}

GrowthFit growth_bound_estimate(const KernelFamily& family, const std::vector<double>& t_grid,
                                const std::vector<GridFunction>& f_samples, const EnvelopeParams& params,
                                const PNorm& norm) {
  if (t_grid.size() < 2 || f_samples.empty()) {
    throw UsageError("growth_bound_estimate needs >= 2 times and >= 1 sample");
  }
  GrowthFit fit;
  fit.t_grid = t_grid;
  for (double t : t_grid) {
    double best = 0.0;
    for (const auto& f : f_samples) {
      const double n = lp_norm(f, norm);
      if (n < 1e-14) continue;
      best = std::max(best, lp_norm(probe_envelope(family, t, f, params), norm) / n);
    }
    fit.ratios.push_back(best);
  }
  const double m = static_cast<double>(t_grid.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double y = std::log(fit.ratios[k]);
    st += t_grid[k];
    sy += y;
    stt += t_grid[k] * t_grid[k];
    sty += t_grid[k] * y;
  }
  const double denom = m * stt - st * st;
  if (std::abs(denom) < 1e-300) {
    throw UsageError("growth_bound_estimate needs at least two distinct times");
  }
  fit.omega = (m * sty - st * sy) / denom;
  fit.M = std::exp((sy - fit.omega * st) / m);
  return fit;
}

}  // namespace semienv
