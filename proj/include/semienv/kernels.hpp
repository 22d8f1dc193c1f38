#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "semienv/funcspace.hpp"

namespace semienv {

/// The uncertainty set: a closed interval or a finite set of reals.
class LambdaSet {
 public:
  static LambdaSet interval(double lo, double hi);
  /// Sorted and de-duplicated; throws ConfigError when empty.
  static LambdaSet finite(std::vector<double> values);

  bool is_interval() const { return interval_; }
  double lo() const { return values_.front(); }
  double hi() const { return values_.back(); }
  /// sup |lambda|
  double abs_sup() const { return std::max(std::abs(lo()), std::abs(hi())); }
  /// inf lambda
  double inf() const { return lo(); }
  /// For finite sets the members; for intervals the two endpoints.
  const std::vector<double>& values() const { return values_; }

  bool contains(double lambda, double tol = 1e-12) const;

  /// The finite set over which suprema are taken: finite sets as they are,
  /// intervals as both endpoints plus `interior` equispaced interior points.
  std::vector<double> sup_candidates(int interior) const;

 private:
  bool interval_ = false;
  std::vector<double> values_;
};

struct JumpAtom {
  double offset = 0.0;
  double weight = 0.0;
};

/// A finitely supported probability measure mu.
class JumpDistribution {
 public:
  /// Weights must be > 0 and sum to 1 within 1e-12.
  static JumpDistribution make(std::vector<JumpAtom> atoms);

  const std::vector<JumpAtom>& atoms() const { return atoms_; }
  /// int (1 ∧ |y|^2) dmu(y)
  double truncated_second_moment() const;
  /// int_{|y| <= 1} y dmu(y)
  double small_jump_mean() const;

 private:
  std::vector<JumpAtom> atoms_;
};

/// Summary Lévy triplet (b, sigma^2, int 1∧|y|^2 dnu) of one member.
struct LevyTriplet {
  double b = 0.0;
  double sigma2 = 0.0;
  double jump_mass = 0.0;
};

enum class FamilyKind { gaussian_drift, compound_poisson, pure_shift };

std::string_view to_string(FamilyKind kind);

/// A family {S_lambda} of linear monotone convolution semigroups:
///   gaussian_drift    E[f(x + W_t + lambda t)], realised as the tilted
///                     lattice walk of drift_diffusion_kernel
///   compound_poisson  e^{-lambda t} sum_n (lambda t)^n/n! (mu^{*n} f)
///   pure_shift        f(x + lambda t)
class KernelFamily {
 public:
  static constexpr int kDefaultGaussianInterior = 3;
  static constexpr int kDefaultPoissonInterior = 9;

  static KernelFamily gaussian_drift(LambdaSet lambdas);
  static KernelFamily compound_poisson(LambdaSet lambdas, JumpDistribution mu);
  static KernelFamily pure_shift(LambdaSet lambdas);

  FamilyKind kind() const { return kind_; }
  const LambdaSet& lambdas() const { return lambdas_; }
  /// Only for compound_poisson.
  const JumpDistribution& jumps() const;

  int interior_samples() const { return interior_samples_; }
  KernelFamily with_interior_samples(int n) const;

  /// Finite lambda set over which the one-step supremum J_h is taken.
  std::vector<double> sup_candidates() const { return lambdas_.sup_candidates(interior_samples_); }

  LevyTriplet triplet(double lambda) const;
  /// sup_lambda |b| + sigma^2 + jump_mass; finite for every family here.
  double levy_condition_bound() const;

  /// Whether an upper-bound operator C(h) exists (not for pure_shift).
  bool has_upper_bound() const { return kind_ != FamilyKind::pure_shift; }

 private:
  KernelFamily(FamilyKind kind, LambdaSet lambdas, std::optional<JumpDistribution> mu, int interior);

  FamilyKind kind_;
  LambdaSet lambdas_;
  std::optional<JumpDistribution> mu_;
  int interior_samples_;
};

struct SeriesOptions {
  /// Dropped Poisson tail probability of the compound Poisson series.
  double series_tol = 1e-12;
};

/// Precomputed one-step operators S_lambda(h) for a list of lambdas on one
/// grid. Reused for every step of a partition with the same increment.
class MemberStep {
 public:
  MemberStep(const KernelFamily& family, std::vector<double> lambdas, double h, const Grid& grid,
             SeriesOptions options = {});

  /// The step realising J_h: members at the family's sup candidates, plus the
  /// exact continuum max-filter for pure_shift over a nondegenerate interval.
  static MemberStep sup_step(const KernelFamily& family, double h, const Grid& grid, SeriesOptions options = {});

  double h() const { return h_; }
  std::span<const double> lambdas() const { return lambdas_; }

  /// S_{lambdas[which]}(h) f
  GridFunction apply(std::size_t which, const GridFunction& f) const;

  /// max over all lambdas of S_lambda(h) f; for a sup_step over a pure_shift
  /// interval, the supremum over the whole continuum of shifts.
  GridFunction apply_max(const GridFunction& f) const;

 private:
  std::vector<GridFunction> jump_powers(const GridFunction& f, std::size_t n_max) const;
  GridFunction poisson_sum(const std::vector<double>& w, const std::vector<GridFunction>& powers) const;

  FamilyKind kind_;
  std::vector<double> lambdas_;
  double h_;
  Grid grid_;
  bool continuum_shift_ = false;
  double shift_lo_ = 0.0;
  double shift_hi_ = 0.0;
  std::vector<Stencil> stencils_;                  // gaussian_drift, pure_shift
  std::vector<std::vector<double>> poisson_;       // compound_poisson
  std::vector<JumpAtom> atoms_;
};

/// Lattice heat semigroup (drift 0) at time t.
GridFunction heat_convolve(const GridFunction& f, double t);

/// mu f = sum_j w_j f(x + y_j), one application of the jump law.
GridFunction jump_average(const JumpDistribution& mu, const GridFunction& f);

/// S_lambda(t) f. Throws UsageError for t < 0 or lambda outside the set.
GridFunction apply_member(const KernelFamily& family, double lambda, double t, const GridFunction& f,
                          SeriesOptions options = {});

/// Central second-order first and second differences; one-sided second order
/// at the two end nodes.
GridFunction first_difference(const GridFunction& f);
GridFunction second_difference(const GridFunction& f);

/// A_lambda f.
GridFunction member_generator(const KernelFamily& family, double lambda, const GridFunction& f);

/// B f = sup_lambda A_lambda f, node by node.
GridFunction sup_generator(const KernelFamily& family, const GridFunction& f);

/// The upper-bound operator C(h). Throws UsageError for pure_shift (no bound
/// exists) and for gaussian_drift with p = 1 (the bound is infinite).
GridFunction upper_bound_C(const KernelFamily& family, double h, const GridFunction& f, const PNorm& norm);

/// The scalar factor kappa(h) in C(h) f = kappa(h) (K_h |f|^p)^{1/p}.
double upper_bound_factor(const KernelFamily& family, double h, const PNorm& norm, double dx);

}  // namespace semienv
