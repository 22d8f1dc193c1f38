#include "semienv/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "semienv/envelope.hpp"
#include "semienv/error.hpp"
#include "semienv/initial_data.hpp"

namespace semienv {

double upwind_abs_gradient(double d_plus, double d_minus, double lambda_bar) {
  return lambda_bar * std::max({d_plus, -d_minus, 0.0});
}

GridFunction hjb_upwind(const GridFunction& f0, double t, double lambda_bar, double cfl,
                        UpwindHamiltonian hamiltonian) {
  if (!(t >= 0.0)) {
    throw UsageError("hjb_upwind: t must be >= 0");
  }
  if (!(cfl > 0.0 && cfl <= 1.0)) {
    throw UsageError("hjb_upwind: cfl must lie in (0, 1]");
  }
  if (!(lambda_bar >= 0.0)) {
    throw UsageError("hjb_upwind: lambda_bar must be >= 0");
  }
  GridFunction u = f0;
  if (t == 0.0) {
    return u;
  }
  const double dx = f0.grid().dx;
  const double dt_max = cfl / (1.0 / (dx * dx) + lambda_bar / dx);
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt_max));
  const double dt = t / static_cast<double>(steps);
  const std::size_t n = u.size();
  std::vector<double> next(n);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < n ? u[i + 1] : 0.0;
      const double d_plus = (right - u[i]) / dx;
      const double d_minus = (u[i] - left) / dx;
      const double diffusion = 0.5 * (right - 2.0 * u[i] + left) / (dx * dx);
      next[i] = u[i] + dt * (diffusion + hamiltonian(d_plus, d_minus, lambda_bar));
    }
    std::copy(next.begin(), next.end(), u.values().begin());
  }
  return u;
}

GridFunction ode_reference(const KernelFamily& family, const GridFunction& f0, double t, double dt) {
  if (family.kind() != FamilyKind::compound_poisson) {
    throw UsageError("ode_reference needs a compound_poisson family");
  }
  if (!(dt > 0.0) || !(t >= 0.0)) {
    throw UsageError("ode_reference needs dt > 0 and t >= 0");
  }
  GridFunction u = f0;
  if (t == 0.0) {
    return u;
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  const double h = t / static_cast<double>(steps);
  auto B = [&](const GridFunction& v) { return sup_generator(family, v); };
  for (std::size_t s = 0; s < steps; ++s) {
    const GridFunction k1 = B(u);
    const GridFunction k2 = B(axpby(1.0, u, 0.5 * h, k1));
    const GridFunction k3 = B(axpby(1.0, u, 0.5 * h, k2));
    const GridFunction k4 = B(axpby(1.0, u, h, k3));
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return u;
}

GridFunction singular_profile(const Grid& grid, double p, double epsilon) {
  const double e = -1.0 / (2.0 * p);
  const double cap = std::pow(epsilon, e);
  return GridFunction::sample(grid, [&](double x) {
    const double a = std::abs(x);
    if (a > 1.0) return 0.0;
    return a <= epsilon ? cap : std::min(cap, std::pow(a, e));
  });
}

std::vector<ScanRow> counterexample_scan(const Grid& grid, double p, double t, const std::vector<double>& epsilons,
                                         const LambdaSet& lambdas) {
  if (!(t > 0.0 && t < 1.0)) {
    throw ConfigError("counterexample time must lie in (0, 1)", "counterexample.t");
  }
  const PNorm norm = PNorm::make(p);
  if (epsilons.empty()) {
    throw ConfigError("counterexample needs at least one epsilon", "counterexample.epsilons");
  }
  const double reach = 1.0 + t * lambdas.abs_sup();
  if (grid.lower > -reach || grid.upper < reach) {
    throw ConfigError("counterexample grid must cover [-" + std::to_string(reach) + ", " + std::to_string(reach) + "]",
                      "grid");
  }
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double eps = epsilons[k];
    if (!(eps > 0.0 && eps < 1.0)) {
      throw ConfigError("epsilons must lie in (0, 1)", "counterexample.epsilons");
    }
    if (k > 0 && !(eps < epsilons[k - 1])) {
      throw ConfigError("epsilons must decrease", "counterexample.epsilons");
    }
    if (eps < 4.0 * grid.dx) {
      const double needed = std::ceil(grid.length() * 4.0 / eps) + 1.0;
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "epsilon %.3g is under-resolved: needs dx <= %.3g, i.e. n_nodes >= %.0f on [%g, %g]", eps,
                    eps / 4.0, needed, grid.lower, grid.upper);
      throw ConfigError(buf, "grid.n_nodes");
    }
  }
  const KernelFamily family = KernelFamily::pure_shift(lambdas);
  const MemberStep J = MemberStep::sup_step(family, t, grid);
  const GridFunction control_bump = bump(grid, 1.0, 0.0, std::exp(1.0));
  std::vector<ScanRow> rows;
  for (double eps : epsilons) {
    const GridFunction f = singular_profile(grid, p, eps);
    GridFunction control = control_bump;
    const double cap = std::pow(eps, -1.0 / (2.0 * p));
    for (std::size_t i = 0; i < control.size(); ++i) control[i] = std::min(cap, control[i]);
    rows.push_back({eps, lp_norm(J.apply_max(f), norm), lp_norm(J.apply_max(control), norm)});
  }
  return rows;
}

Comparison compare(const GridFunction& a, const GridFunction& b, const PNorm& norm, double boundary_margin) {
  require_same_grid(a, b);
  const IndexRange in = interior(a.grid(), boundary_margin);
  const GridFunction d = a - b;
  Comparison c;
  c.margin = boundary_margin;
  c.abs_err = lp_norm(d, norm, in);
  c.rel_err = c.abs_err / std::max(lp_norm(a, norm, in), 1e-14);
  for (std::size_t i = in.first; i < in.last; ++i) c.max_err = std::max(c.max_err, std::abs(d[i]));
  return c;
}

}  // namespace semienv
