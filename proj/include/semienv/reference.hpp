#pragma once

#include <vector>

#include "semienv/funcspace.hpp"
#include "semienv/kernels.hpp"

namespace semienv {

/// Numerical Hamiltonian of the first-order term, given the one-sided
/// differences D+u, D-u at a node.
using UpwindHamiltonian = double (*)(double d_plus, double d_minus, double lambda_bar);

/// lambda_bar * max(D+u, -D-u, 0): monotone upwinding of lambda_bar |u_x|.
double upwind_abs_gradient(double d_plus, double d_minus, double lambda_bar);

/// Explicit Euler for u_t = u_xx / 2 + lambda_bar |u_x| with zero Dirichlet
/// data outside the grid and dt = cfl / (1/dx^2 + lambda_bar/dx), shortened
/// so that a whole number of steps reaches t.
GridFunction hjb_upwind(const GridFunction& f0, double t, double lambda_bar, double cfl = 0.9,
                        UpwindHamiltonian hamiltonian = upwind_abs_gradient);

/// Classical RK4 for u' = B u, B the sup generator of a compound_poisson
/// family, with the step shortened so that a whole number reaches t.
GridFunction ode_reference(const KernelFamily& family, const GridFunction& f0, double t, double dt);

struct ScanRow {
  double epsilon = 0.0;
  double norm_lp = 0.0;
  /// ||J_t g||_p for the bounded control g = min(eps^{-1/(2p)}, bump).
  double control_norm_lp = 0.0;
};

/// f_eps(x) = min(eps^{-1/(2p)}, |x|^{-1/(2p)}) on [-1, 1], zero elsewhere.
GridFunction singular_profile(const Grid& grid, double p, double epsilon);

/// ||J_t f_eps||_p for the pure_shift family over `lambdas` (default
/// [-1, 1]). Throws ConfigError when some eps < 4 dx or the grid does not
/// cover [-1 - t, 1 + t].
std::vector<ScanRow> counterexample_scan(const Grid& grid, double p, double t, const std::vector<double>& epsilons,
                                         const LambdaSet& lambdas = LambdaSet::interval(-1.0, 1.0));

struct Comparison {
  double abs_err = 0.0;
  double rel_err = 0.0;
  double max_err = 0.0;
  double margin = 0.0;
};

/// L^p and sup distances over the interior window; rel_err divides by
/// max(||a||_p, 1e-14) on the same window.
Comparison compare(const GridFunction& a, const GridFunction& b, const PNorm& norm, double boundary_margin);

}  // namespace semienv
