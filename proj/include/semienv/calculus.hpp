#pragma once

#include <cstdint>
#include <vector>

#include "semienv/envelope.hpp"
#include "semienv/funcspace.hpp"
#include "semienv/kernels.hpp"

namespace semienv {

/// The fixed convex operator S~(t) = J_pi for the dyadic partition of [0, t]
/// at params.probe_level; the identity at t = 0.
GridFunction probe_envelope(const KernelFamily& family, double t, const GridFunction& f, const EnvelopeParams& params);

/// S~(h) as used for generator quotients: dyadic level 2, so every time step
/// is h/4.
GridFunction short_time_envelope(const KernelFamily& family, double h, const GridFunction& f,
                                 const EnvelopeParams& params);

/// h0 * 2^{-k}, k = 0..halvings.
std::vector<double> halving_schedule(double h0, int halvings);

struct GeneratorEstimate {
  std::vector<double> h_schedule;
  std::vector<GridFunction> quotients;
  /// ||quotient - B f||_p over the interior window.
  std::vector<double> errors_vs_B;
  /// 2 Q(h_min) - Q(2 h_min).
  GridFunction extrapolated;
  double extrapolated_error = 0.0;
  bool strictly_decreasing = false;
};

GeneratorEstimate generator_fd(const KernelFamily& family, const GridFunction& f, double h0, int k_steps,
                               const EnvelopeParams& params, const PNorm& norm);

/// (S~(h) f - f) / h.
GridFunction generator_quotient(const KernelFamily& family, const GridFunction& f, double h,
                                const EnvelopeParams& params);

struct DerivativeProbe {
  double t = 0.0;
  GridFunction x;
  GridFunction y;
  /// (S~(t)(x + h y) - S~(t) x) / h at the smallest h.
  GridFunction plus;
  /// (S~(t) x - S~(t)(x - h y)) / h at the smallest h.
  GridFunction minus;
  double gap = 0.0;
  /// Plus quotients non-increasing and minus quotients non-decreasing as h
  /// decreases, and minus <= plus, all within 1e-9.
  bool quotient_monotone = true;
  /// Largest violation of those orderings (<= 0 when they hold strictly).
  double worst_violation = 0.0;
};

/// Both one-sided directional derivatives of S~(t) at x in direction y.
DerivativeProbe directional_derivative(const KernelFamily& family, double t, const GridFunction& x,
                                       const GridFunction& y, const std::vector<double>& h_schedule,
                                       const EnvelopeParams& params, const PNorm& norm);

struct DerivativeIdentityReport {
  double t = 0.0;
  /// (S~(h) g - g)/h with g = S~(t) f: the generator applied to S(t) f.
  GridFunction forward;
  GridFunction plus;
  GridFunction minus;
  /// Relative interior distances, normalised by ||forward||_p.
  double gap_forward_plus = 0.0;
  double gap_forward_minus = 0.0;
  double gap_plus_minus = 0.0;
  double tolerance = 5e-2;
  bool pass = false;
};

DerivativeIdentityReport derivative_identity_check(const KernelFamily& family, double t, const GridFunction& f,
                                                   const std::vector<double>& h_schedule,
                                                   const EnvelopeParams& params, const PNorm& norm,
                                                   double tolerance = 5e-2);

/// ||S~(t) f - f - int_0^t S'_+(s, f)(B f) ds||_p / ||S~(t) f - f||_p with
/// composite Simpson over quad_nodes (odd, >= 3) times and the plus
/// quotient at step h. Defined as 0 when ||S~(t) f - f||_p < 1e-12.
double integral_identity_check(const KernelFamily& family, double t, const GridFunction& f, int quad_nodes,
                               double h, const EnvelopeParams& params, const PNorm& norm);

struct LipschitzReport {
  double L = 0.0;
  std::size_t pairs_used = 0;
  /// Largest sampled ||T(+-r x/||x||)||_p with T = S~(t)(.) - S~(t) 0.
  double b = 0.0;
  /// max over test points of ||T x||_p - (2b/r) ||x||_p.
  double lemma_worst = 0.0;
  bool lemma_holds = true;
};

/// Seeded random smooth pairs in the ball B(x0, r). Bound check: for each
/// sampled direction u with ||u|| <= r, ||T u|| <= (2b/r) ||u|| where b is
/// the largest ||T(+-r u/||u||)|| over all sampled directions.
LipschitzReport lipschitz_probe(const KernelFamily& family, double t, const GridFunction& x0, double r, int samples,
                                const EnvelopeParams& params, const PNorm& norm, std::uint64_t seed);

struct GrowthFit {
  double M = 1.0;
  double omega = 0.0;
  std::vector<double> t_grid;
  /// sup_f ||S~(t) f|| / ||f|| at each t.
  std::vector<double> ratios;
};

/// Least-squares fit log ratio(t) = log M + omega t.
GrowthFit growth_bound_estimate(const KernelFamily& family, const std::vector<double>& t_grid,
                                const std::vector<GridFunction>& f_samples, const EnvelopeParams& params,
                                const PNorm& norm);

/// lp_norm over the interior window.
double interior_norm(const GridFunction& f, const PNorm& norm, double margin);

}  // namespace semienv
