#pragma once

#include <optional>
#include <vector>

#include "semienv/funcspace.hpp"
#include "semienv/kernels.hpp"

namespace semienv {

/// Time grid 0 = t_0 < t_1 < ... < t_m.
class Partition {
 public:
  /// Throws UsageError unless times start at 0 and increase strictly.
  static Partition from_times(std::vector<double> times);
  /// {k t / 2^n : k = 0..2^n}; every increment is exactly t / 2^n.
  static Partition dyadic(double t, int level);

  const std::vector<double>& times() const { return times_; }
  /// Increments t_j - t_{j-1}, j = 1..m.
  const std::vector<double>& increments() const { return steps_; }
  double end() const { return times_.back(); }
  double mesh() const;
  std::size_t steps() const { return steps_.size(); }

  /// Every point of *this is a point of `finer` (within 1e-12 relative).
  bool is_refined_by(const Partition& finer) const;

 private:
  std::vector<double> times_;
  std::vector<double> steps_;
};

struct EnvelopeParams {
  double tol_rel = 1e-4;
  int n_max = 12;
  /// Dyadic level of the fixed operator S~(t) used by derivative probes.
  int probe_level = 8;
  /// Fraction of nodes per side excluded from comparisons; also the width
  /// of each boundary strip in the leakage metric.
  double boundary_margin = 0.05;
  SeriesOptions series;
};

/// J_h f = sup_lambda S_lambda(h) f. Throws UsageError for h <= 0.
GridFunction step_J(const KernelFamily& family, double h, const GridFunction& f, SeriesOptions options = {});

/// J_pi f = J_{t_1 - t_0} ... J_{t_m - t_{m-1}} f: the last increment acts first.
GridFunction apply_partition(const KernelFamily& family, const Partition& pi, const GridFunction& f,
                             SeriesOptions options = {});

/// J_pi f for the dyadic partition of [0, t] at `level`; f itself for t = 0.
GridFunction dyadic_iterate(const KernelFamily& family, double t, int level, const GridFunction& f,
                            SeriesOptions options = {});

struct LevelRecord {
  int level = 0;
  std::size_t steps = 1;
  double h = 0.0;
  double norm_lp = 0.0;
  /// ||T_n f - T_{n-1} f||_p; absent at level 0.
  std::optional<double> increment_lp;
  /// min_i (T_n f - T_{n-1} f)_i; absent at level 0.
  std::optional<double> min_pointwise_increment;
};

struct EnvelopeResult {
  GridFunction final;
  std::vector<LevelRecord> levels;
  int levels_used = 0;
  bool converged = false;
  /// min over levels of min_pointwise_increment (+inf for a single level).
  double worst_monotonicity = 0.0;
  /// max_i (final - C(t) f)_i, when C(t) exists.
  std::optional<double> upper_bound_margin;
  double boundary_leakage = 0.0;
};

/// Dyadic Nisio iteration T_n f = J_{pi_n} f, n = 0, 1, ..., each level built
/// from scratch, until ||T_n f - T_{n-1} f||_p <= tol_rel ||f||_p or n = n_max.
EnvelopeResult nisio_dyadic(const KernelFamily& family, double t, const GridFunction& f, double tol_rel, int n_max,
                            const PNorm& norm, const EnvelopeParams& params = {});

struct UpperBoundCertificate {
  bool available = false;
  bool pass = false;
  double margin = 0.0;
  double threshold = 0.0;
};

/// Compares result.final with C(t) f; passes when the excess is at most
/// 1e-6 (1 + ||f||_inf). Unavailable for pure_shift and for the Gaussian
/// family at p = 1.
UpperBoundCertificate check_upper_bound(const KernelFamily& family, double t, const EnvelopeResult& result,
                                        const GridFunction& f, const PNorm& norm);

/// L^p norm of f over the two boundary strips of `margin` * n_nodes nodes.
double boundary_leakage(const GridFunction& f, const PNorm& norm, double margin);

}  // namespace semienv
