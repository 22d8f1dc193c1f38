#include "semienv/verify.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <random>

#include "semienv/calculus.hpp"
#include "semienv/envelope.hpp"
#include "semienv/error.hpp"
#include "semienv/experiment.hpp"
#include "semienv/initial_data.hpp"

namespace semienv {

namespace {

struct Context {
  Grid grid;
  int samples = 10;
  std::mt19937_64 rng;
  UpwindHamiltonian hamiltonian = upwind_abs_gradient;
  PNorm norm = PNorm::make(2.0);
  EnvelopeParams params;

  // Supported in the middle 30% of the domain, far from the zero-extension boundary.
  GridFunction random_input() { return random_smooth_bump(grid, rng, 0.15 * grid.length()); }
  GridFunction random_nonnegative() {
    GridFunction f = random_input();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::abs(f[i]);
    return f;
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

KernelFamily gaussian_family() { return KernelFamily::gaussian_drift(LambdaSet::interval(-1.0, 1.0)); }
KernelFamily poisson_family() {
  return KernelFamily::compound_poisson(LambdaSet::finite({0.0, 1.0}),
                                        JumpDistribution::make({{0.25, 0.5}, {-0.15, 0.5}}));
}
KernelFamily shift_family() { return KernelFamily::pure_shift(LambdaSet::interval(-1.0, 1.0)); }
std::vector<KernelFamily> all_families() { return {gaussian_family(), poisson_family(), shift_family()}; }

// ---------------------------------------------------------------- funcspace

Check interp_shift_monotone(Context& c) {
  double worst = -INFINITY;
  for (int k = 0; k < c.samples; ++k) {
    const GridFunction f = c.random_input();
    const GridFunction g = f + c.random_nonnegative();
    const double delta = c.uniform(-0.4, 0.4) * c.grid.length();
    worst = std::max(worst, pointwise_leq(interp_shift(f, delta), interp_shift(g, delta), 0.0).worst);
  }
  return make_check("funcspace.interp_shift_monotone", worst <= 0.0, worst, 0.0, "f <= g implies shifted order, exactly");
}

Check interp_shift_linear(Context& c) {
  double worst_ulps = 0.0;
  for (int k = 0; k < c.samples; ++k) {
    const GridFunction f = c.random_input();
    const GridFunction g = c.random_input();
    const double a = c.uniform(-2.0, 2.0), b = c.uniform(-2.0, 2.0);
    const double delta = c.uniform(-0.3, 0.3) * c.grid.length();
    const GridFunction lhs = interp_shift(axpby(a, f, b, g), delta);
    const GridFunction rhs = axpby(a, interp_shift(f, delta), b, interp_shift(g, delta));
    const Stencil s = shift_stencil(delta, c.grid.dx);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      double scale = 0.0;
      for (std::size_t q = 0; q < s.weights.size(); ++q) {
        const auto j = static_cast<std::ptrdiff_t>(i) + s.offset + static_cast<std::ptrdiff_t>(q);
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(f.size())) continue;
        scale = std::max(scale, std::abs(a * f[static_cast<std::size_t>(j)]) + std::abs(b * g[static_cast<std::size_t>(j)]));
      }
      const double diff = std::abs(lhs[i] - rhs[i]);
      if (diff > 0.0) worst_ulps = std::max(worst_ulps, diff / (DBL_EPSILON * scale));
    }
  }
  return make_check("funcspace.interp_shift_linear", worst_ulps <= 4.0, worst_ulps, 4.0, "ulps of local magnitude");
}

Check lp_norm_homogeneous(Context& c) {
  double worst = 0.0;
  for (int k = 0; k < c.samples; ++k) {
    const GridFunction f = c.random_input();
    const double a = c.uniform(-5.0, 5.0);
    const double n = lp_norm(f, c.norm);
    worst = std::max(worst, std::abs(lp_norm(a * f, c.norm) - std::abs(a) * n) / (std::abs(a) * n));
  }
  return make_check("funcspace.lp_norm_homogeneous", worst <= 1e-12, worst, 1e-12, "relative");
}

Check pointwise_max_lub(Context& c) {
  bool ok = true;
  for (int k = 0; k < c.samples; ++k) {
    std::vector<GridFunction> fs{c.random_input(), c.random_input(), c.random_input()};
    const GridFunction m = pointwise_max(fs);
    std::vector<GridFunction> perm{fs[2], fs[0], fs[1]};
    const GridFunction mp = pointwise_max(perm);
    ok = ok && std::equal(m.values().begin(), m.values().end(), mp.values().begin());
    for (std::size_t drop = 0; drop < fs.size(); ++drop) {
      std::vector<GridFunction> rest;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != drop) rest.push_back(fs[j]);
      ok = ok && pointwise_leq(pointwise_max(rest), m, 0.0).holds;
    }
    for (const auto& f : fs) ok = ok && pointwise_leq(f, m, 0.0).holds;
  }
  return make_check("funcspace.pointwise_max_lub", ok, ok ? 0.0 : 1.0, 0.0, "upper bound, least, permutation invariant");
}

// ------------------------------------------------------------------ kernels

Check member_linearity(Context& c) {
  double worst = 0.0;
  for (const auto& fam : all_families()) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input(), g = c.random_input();
      const double a = c.uniform(-2.0, 2.0), b = c.uniform(-2.0, 2.0);
      const double lambda = fam.lambdas().hi();
      const double t = c.uniform(0.01, 0.3);
      const GridFunction lhs = apply_member(fam, lambda, t, axpby(a, f, b, g));
      const GridFunction rhs = axpby(a, apply_member(fam, lambda, t, f), b, apply_member(fam, lambda, t, g));
      worst = std::max(worst, lp_norm(lhs - rhs, c.norm) / std::max(lp_norm(rhs, c.norm), 1e-300));
    }
  }
  return make_check("kernels.member_linearity", worst <= 1e-10, worst, 1e-10, "relative L^p");
}

Check member_monotone(Context& c) {
  double worst = -INFINITY;
  for (const auto& fam : all_families()) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const GridFunction g = f + c.random_nonnegative();
      for (double lambda : fam.sup_candidates()) {
        const double t = c.uniform(0.01, 0.3);
        worst = std::max(worst, pointwise_leq(apply_member(fam, lambda, t, f), apply_member(fam, lambda, t, g), 0.0).worst);
      }
    }
  }
  return make_check("kernels.member_monotone", worst <= 0.0, worst, 0.0, "exact");
}

Check mass_conservation(Context& c) {
  double worst = 0.0;
  const GridFunction one(c.grid, 1.0);
  // Wide enough that no jump chain of non-negligible probability reaches the boundary.
  const IndexRange in = interior(c.grid, 0.25);
  for (const auto& fam : all_families()) {
    for (double lambda : fam.sup_candidates()) {
      const GridFunction g = apply_member(fam, lambda, 0.005, one);
      for (std::size_t i = in.first; i < in.last; ++i) worst = std::max(worst, std::abs(g[i] - 1.0));
    }
  }
  return make_check("kernels.mass_conservation", worst <= 1e-10, worst, 1e-10, "constants fixed on the interior");
}

Check member_semigroup(Context& c) {
  double worst = 0.0;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const double t = c.uniform(0.01, 0.2), s = c.uniform(0.01, 0.2);
      for (double lambda : fam.sup_candidates()) {
        const GridFunction a = apply_member(fam, lambda, t + s, f);
        const GridFunction b = apply_member(fam, lambda, t, apply_member(fam, lambda, s, f));
        worst = std::max(worst, lp_norm(a - b, c.norm) / lp_norm(f, c.norm));
      }
    }
  }
  return make_check("kernels.member_semigroup", worst <= 1e-9, worst, 1e-9, "relative L^p, lattice members");
}

Check domination(Context& c) {
  double worst = -INFINITY;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const double h = c.uniform(0.01, 0.5);
      const GridFunction bound = upper_bound_C(fam, h, f, c.norm);
      for (double lambda : fam.lambdas().sup_candidates(7)) {
        worst = std::max(worst, pointwise_leq(apply_member(fam, lambda, h, f), bound, 0.0).worst);
      }
    }
  }
  return make_check("kernels.domination_by_C", worst <= 1e-9, worst, 1e-9, "S_lambda(h) f <= C(h) f");
}

Check c_flow(Context& c) {
  double worst = 0.0;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const double h1 = c.uniform(0.01, 0.3), h2 = c.uniform(0.01, 0.3);
      const GridFunction a = upper_bound_C(fam, h1, upper_bound_C(fam, h2, f, c.norm), c.norm);
      const GridFunction b = upper_bound_C(fam, h1 + h2, f, c.norm);
      worst = std::max(worst, lp_norm(a - b, c.norm) / lp_norm(f, c.norm));
    }
  }
  return make_check("kernels.C_flow", worst <= 1e-9, worst, 1e-9, "C(h1) C(h2) = C(h1 + h2)");
}

// ----------------------------------------------------------------- envelope

Check step_monotone(Context& c) {
  double worst = -INFINITY;
  for (const auto& fam : all_families()) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const GridFunction g = f + c.random_nonnegative();
      const double h = c.uniform(0.01, 0.3);
      worst = std::max(worst, pointwise_leq(step_J(fam, h, f), step_J(fam, h, g), 0.0).worst);
    }
  }
  return make_check("envelope.step_J_monotone", worst <= 0.0, worst, 0.0, "exact");
}

Check step_convex(Context& c) {
  double worst = -INFINITY;
  for (const auto& fam : all_families()) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input(), g = c.random_input();
      const double a = c.uniform(0.0, 1.0), h = c.uniform(0.01, 0.3);
      const GridFunction lhs = step_J(fam, h, axpby(a, f, 1.0 - a, g));
      const GridFunction rhs = axpby(a, step_J(fam, h, f), 1.0 - a, step_J(fam, h, g));
      worst = std::max(worst, pointwise_leq(lhs, rhs, 0.0).worst);
    }
  }
  return make_check("envelope.step_J_convex", worst <= 1e-10, worst, 1e-10, "J(af + (1-a)g) <= aJf + (1-a)Jg");
}

Check step_homogeneous(Context& c) {
  double worst = 0.0;
  for (const auto& fam : all_families()) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const double s = c.uniform(0.1, 10.0), h = c.uniform(0.01, 0.3);
      const GridFunction a = step_J(fam, h, s * f);
      const GridFunction b = s * step_J(fam, h, f);
      worst = std::max(worst, lp_norm(a - b, c.norm) / std::max(lp_norm(b, c.norm), 1e-300));
    }
  }
  return make_check("envelope.step_J_homogeneous", worst <= 1e-10, worst, 1e-10, "relative");
}

Partition random_partition(Context& c, double t, int max_points) {
  const int m = std::uniform_int_distribution<int>(1, max_points)(c.rng);
  std::vector<double> times{0.0, t};
  for (int k = 0; k < m; ++k) times.push_back(c.uniform(0.0, t));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [&](double a, double b) { return b - a < 1e-6 * t; }),
              times.end());
  times.back() = t;
  return Partition::from_times(times);
}

Partition refine(Context& c, const Partition& coarse, int extra) {
  std::vector<double> times = coarse.times();
  const double t = coarse.end();
  for (int k = 0; k < extra; ++k) times.push_back(c.uniform(0.0, t));
  std::sort(times.begin(), times.end());
  std::vector<double> kept;
  for (double x : times) {
    if (kept.empty() || x - kept.back() >= 1e-6 * t) {
      kept.push_back(x);
    } else if (std::find(coarse.times().begin(), coarse.times().end(), x) != coarse.times().end()) {
      kept.back() = x;  // prefer the coarse point
    }
  }
  kept.back() = t;
  return Partition::from_times(kept);
}

// pure_shift is left out: interpolated shifts do not compose exactly, so
// refinement monotonicity holds for it only up to O(dx^2 f'').
Check refinement_monotone(Context& c) {
  double worst = -INFINITY;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    for (int k = 0; k < c.samples; ++k) {
      const GridFunction f = c.random_input();
      const Partition p1 = random_partition(c, 0.5, 6);
      const Partition p2 = refine(c, p1, 6);
      if (!p1.is_refined_by(p2)) throw UsageError("fixture produced a non-nested pair");
      worst = std::max(worst, pointwise_leq(apply_partition(fam, p1, f), apply_partition(fam, p2, f), 0.0).worst);
    }
  }
  return make_check("envelope.refinement_monotone", worst <= 1e-9, worst, 1e-9, "J_pi1 <= J_pi2 for pi1 in pi2");
}

Check random_partition_no_exceedance(Context& c) {
  double worst = -INFINITY;
  const double t = 0.5;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    const GridFunction f = bump(c.grid, 1.0);
    const EnvelopeResult r = nisio_dyadic(fam, t, f, 1e-4, 12, c.norm, c.params);
    const double slack = 1e-4 * lp_norm(f, c.norm);
    const double min_step = std::ldexp(t, -r.levels_used);
    for (int k = 0; k < c.samples; ++k) {
      // Random step sizes, each at least t 2^{-n}.
      std::vector<double> times{0.0};
      while (times.back() < t) {
        times.push_back(times.back() + c.uniform(min_step, 8.0 * min_step));
      }
      times.back() = t;
      if (times.size() > 2 && times[times.size() - 1] - times[times.size() - 2] < min_step) {
        times.erase(times.end() - 2);
      }
      const Partition pi = Partition::from_times(times);
      worst = std::max(worst, pointwise_leq(apply_partition(fam, pi, f), r.final, 0.0).worst - slack);
    }
  }
  return make_check("envelope.random_partition_no_exceedance", worst <= 0.0, worst, 0.0,
                    "J_pi f <= dyadic limit + tol_rel ||f||");
}

Check upper_bound_certificate(Context& c) {
  double worst = -INFINITY;
  bool pass = true;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    const GridFunction f = bump(c.grid, 1.0);
    const EnvelopeResult r = nisio_dyadic(fam, 0.5, f, 1e-4, 8, c.norm, c.params);
    const UpperBoundCertificate cert = check_upper_bound(fam, 0.5, r, f, c.norm);
    pass = pass && cert.available && cert.pass;
    worst = std::max(worst, cert.margin);
  }
  return make_check("envelope.upper_bound_certificate", pass, worst, 1e-6, "final <= C(t) f");
}

// ----------------------------------------------------------------- calculus

Check derivative_orderings(Context& c) {
  double worst = -INFINITY;
  const auto hs = halving_schedule(0.1, 4);
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    for (int k = 0; k < std::max(2, c.samples / 4); ++k) {
      const GridFunction x = c.random_input(), y = c.random_input();
      const DerivativeProbe p = directional_derivative(fam, 0.2, x, y, hs, c.params, c.norm);
      worst = std::max(worst, p.worst_violation);
    }
  }
  return make_check("calculus.quotient_monotone_and_ordered", worst <= 1e-9, worst, 1e-9,
                    "plus quotients decrease with h, minus increase, minus <= plus");
}

Check generator_scaling(Context& c) {
  double worst = 0.0;
  for (const auto& fam : all_families()) {
    const GridFunction f = bump(c.grid, 1.0);
    const double s = c.uniform(0.5, 4.0);
    const GridFunction a = generator_quotient(fam, s * f, 0.05, c.params);
    const GridFunction b = s * generator_quotient(fam, f, 0.05, c.params);
    worst = std::max(worst, lp_norm(a - b, c.norm) / lp_norm(b, c.norm));
  }
  return make_check("calculus.generator_scaling", worst <= 1e-10, worst, 1e-10, "quotient(cf) = c quotient(f)");
}

Check closedness(Context& c) {
  const KernelFamily fam = gaussian_family();
  const double h = 0.05;
  const GridFunction q = generator_quotient(fam, bump(c.grid, 1.0), h, c.params);
  std::vector<double> dist;
  for (int n = 1; n <= 10; ++n) {
    const GridFunction qn = generator_quotient(fam, bump(c.grid, 1.0 + std::ldexp(1.0, -n)), h, c.params);
    dist.push_back(interior_norm(qn - q, c.norm, 0.05) / interior_norm(q, c.norm, 0.05));
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < dist.size(); ++k) decreasing = decreasing && dist[k] < dist[k - 1];
  return make_check("calculus.closedness", decreasing && dist.back() <= 0.05, dist.back(), 0.05,
                    "quotients of bump dilations converge to the quotient of the limit");
}

Check lipschitz_heat(Context& c) {
  const KernelFamily heat = KernelFamily::gaussian_drift(LambdaSet::finite({0.0}));
  const LipschitzReport r = lipschitz_probe(heat, 0.5, bump(c.grid, 1.0), 1.0, c.samples, c.params, c.norm, c.rng());
  return make_check("calculus.lipschitz_heat_contraction", r.L <= 1.0 + 1e-6, r.L, 1.0 + 1e-6, "L^p contraction");
}

Check recentered_bound(Context& c) {
  double worst = -INFINITY;
  bool holds = true;
  for (const auto& fam : {gaussian_family(), poisson_family()}) {
    const LipschitzReport r = lipschitz_probe(fam, 0.5, bump(c.grid, 1.0), 1.0, c.samples, c.params, c.norm, c.rng());
    holds = holds && r.lemma_holds;
    worst = std::max(worst, r.lemma_worst);
  }
  return make_check("calculus.recentered_norm_bound", holds, worst, 0.0, "||T x|| <= (2b/r) ||x||");
}

Check growth_heat(Context& c) {
  const KernelFamily heat = KernelFamily::gaussian_drift(LambdaSet::finite({0.0}));
  const GrowthFit fit = growth_bound_estimate(heat, {0.25, 0.5, 0.75, 1.0},
                                              {bump(c.grid, 1.0), gaussian(c.grid, 0.5)}, c.params, c.norm);
  return make_check("calculus.growth_heat", fit.omega <= 0.05 && fit.M <= 1.05, fit.omega, 0.05,
                    "contraction: omega <= 0.05 and M <= 1.05");
}

// ---------------------------------------------------------------- reference

Check hjb_monotone(Context& c) {
  // Coarse mesh and a large lambda_bar, where only upwinding keeps the scheme monotone.
  const Grid g = make_grid(-5.0, 5.0, 41);
  double worst = -INFINITY;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < c.samples; ++k) {
    GridFunction f(g), gg(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = normal(c.rng);
      gg[i] = f[i] + std::abs(normal(c.rng));
    }
    const GridFunction a = hjb_upwind(f, 0.2, 4.0, 1.0, c.hamiltonian);
    const GridFunction b = hjb_upwind(gg, 0.2, 4.0, 1.0, c.hamiltonian);
    worst = std::max(worst, pointwise_leq(a, b, 0.0).worst);
  }
  return make_check("reference.hjb_monotone", worst <= 1e-12, worst, 1e-12, "f <= g implies ordered solutions");
}

Check hjb_constants(Context& c) {
  const GridFunction one(c.grid, 1.0);
  const GridFunction u = hjb_upwind(one, 1e-3, 1.0, 0.9, c.hamiltonian);
  const IndexRange in = interior(c.grid, 0.05);
  double worst = 0.0;
  for (std::size_t i = in.first; i < in.last; ++i) worst = std::max(worst, std::abs(u[i] - 1.0));
  return make_check("reference.hjb_constants", worst <= 1e-12, worst, 1e-12, "constants solve the PDE");
}

Check ode_rk4_order(Context&) {
  const Grid g = make_grid(-10.0, 10.0, 401);
  const KernelFamily fam = KernelFamily::compound_poisson(LambdaSet::finite({1.0}), JumpDistribution::make({{1.0, 1.0}}));
  const GridFunction f = bump(g, 2.0);
  const GridFunction exact = apply_member(fam, 1.0, 1.0, f);
  const PNorm n = PNorm::make(2.0);
  const double e1 = lp_norm(ode_reference(fam, f, 1.0, 0.1) - exact, n);
  const double e2 = lp_norm(ode_reference(fam, f, 1.0, 0.05) - exact, n);
  const double ratio = e1 / e2;
  return make_check("reference.ode_rk4_order", ratio >= 12.0 && ratio <= 20.0, ratio, 16.0,
                    "error ratio between dt and dt/2 in [12, 20]");
}

Check ode_singleton(Context&) {
  const Grid g = make_grid(-10.0, 10.0, 401);
  const KernelFamily fam = KernelFamily::compound_poisson(LambdaSet::finite({1.0}), JumpDistribution::make({{1.0, 1.0}}));
  const GridFunction f = bump(g, 2.0);
  const PNorm n = PNorm::make(2.0);
  const double err = lp_norm(ode_reference(fam, f, 1.0, 1e-3) - apply_member(fam, 1.0, 1.0, f), n) / lp_norm(f, n);
  return make_check("reference.ode_matches_series", err <= 1e-8, err, 1e-8, "linear case");
}

Check counterexample_monotone(Context&) {
  const Grid g = make_grid(-2.0, 2.0, 1601);
  const auto rows = counterexample_scan(g, 2.0, 0.5, {1e-1, 3e-2, 1e-2});
  bool ok = true;
  for (std::size_t k = 1; k < rows.size(); ++k) ok = ok && rows[k].norm_lp >= rows[k - 1].norm_lp;
  return make_check("reference.counterexample_nondecreasing", ok, rows.back().norm_lp / rows.front().norm_lp, 1.0,
                    "norm ratio last / first");
}

Check family_fixture(Context& c, const nlohmann::json& j) {
  const KernelFamily fam = parse_family(j);
  double worst = -INFINITY;
  for (int k = 0; k < c.samples; ++k) {
    const GridFunction f = c.random_input();
    const GridFunction g = f + c.random_nonnegative();
    worst = std::max(worst, pointwise_leq(step_J(fam, 0.1, f), step_J(fam, 0.1, g), 0.0).worst);
  }
  return make_check("", worst <= 0.0, worst, 0.0, "step_J monotone");
}

using CheckFn = Check (*)(Context&);

const std::vector<std::pair<const char*, CheckFn>>& registry() {
  static const std::vector<std::pair<const char*, CheckFn>> checks = {
      {"funcspace.interp_shift_monotone", interp_shift_monotone},
      {"funcspace.interp_shift_linear", interp_shift_linear},
      {"funcspace.lp_norm_homogeneous", lp_norm_homogeneous},
      {"funcspace.pointwise_max_lub", pointwise_max_lub},
      {"kernels.member_linearity", member_linearity},
      {"kernels.member_monotone", member_monotone},
      {"kernels.mass_conservation", mass_conservation},
      {"kernels.member_semigroup", member_semigroup},
      {"kernels.domination_by_C", domination},
      {"kernels.C_flow", c_flow},
      {"envelope.step_J_monotone", step_monotone},
      {"envelope.step_J_convex", step_convex},
      {"envelope.step_J_homogeneous", step_homogeneous},
      {"envelope.refinement_monotone", refinement_monotone},
      {"envelope.random_partition_no_exceedance", random_partition_no_exceedance},
      {"envelope.upper_bound_certificate", upper_bound_certificate},
      {"calculus.quotient_monotone_and_ordered", derivative_orderings},
      {"calculus.generator_scaling", generator_scaling},
      {"calculus.closedness", closedness},
      {"calculus.lipschitz_heat_contraction", lipschitz_heat},
      {"calculus.recentered_norm_bound", recentered_bound},
      {"calculus.growth_heat", growth_heat},
      {"reference.hjb_monotone", hjb_monotone},
      {"reference.hjb_constants", hjb_constants},
      {"reference.ode_rk4_order", ode_rk4_order},
      {"reference.ode_matches_series", ode_singleton},
      {"reference.counterexample_nondecreasing", counterexample_monotone},
  };
  return checks;
}

template <class F>
Check guarded(const std::string& name, F&& fn) {
  Check out;
  try {
    out = fn();
  } catch (const ConfigError& e) {
    out = Check{name, CheckStatus::config_error, 0.0, 0.0, e.what()};
  } catch (const std::exception& e) {
    out = Check{name, CheckStatus::fail, 0.0, 0.0, std::string("exception: ") + e.what()};
  }
  out.name = name;
  return out;
}

}  // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.emplace_back(name);
  return names;
}

Report verify_suite(const VerifyOptions& options) {
  if (options.scale != "small" && options.scale != "full") {
    throw ConfigError("scale must be small or full", "scale");
  }
  const bool full = options.scale == "full";
  Report rep;
  rep.subcommand = "verify";
  rep.seed = options.seed;
  rep.version = library_version();
  std::uint64_t k = 0;
  auto context = [&] {
    Context c;
    c.grid = full ? make_grid(-10.0, 10.0, 2049) : make_grid(-10.0, 10.0, 501);
    c.samples = full ? 100 : 12;
    // Each check gets its own stream so that checks are independent of order.
    c.rng.seed(options.seed * 1000003ULL + (++k));
    c.hamiltonian = options.hamiltonian;
    return c;
  };
  for (const auto& [name, fn] : registry()) {
    Context c = context();
    rep.checks.push_back(guarded(name, [&] { return fn(c); }));
  }
  for (std::size_t i = 0; i < options.family_fixtures.size(); ++i) {
    Context c = context();
    const std::string name = "fixture.family[" + std::to_string(i) + "]";
    rep.checks.push_back(guarded(name, [&] { return family_fixture(c, options.family_fixtures[i]); }));
  }
  rep.metrics = {{"scale", options.scale}, {"checks", rep.checks.size()}};
  return rep;
}

}  // namespace semienv
