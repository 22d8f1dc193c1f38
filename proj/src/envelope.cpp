#include "semienv/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semienv/error.hpp"

namespace semienv {

Partition Partition::from_times(std::vector<double> times) {
  if (times.size() < 2 || times.front() != 0.0) {
    throw UsageError("a partition needs t_0 = 0 and at least one step");
  }
  Partition pi;
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1]) || !std::isfinite(times[j])) {
      throw UsageError("partition times must increase strictly");
    }
    pi.steps_.push_back(times[j] - times[j - 1]);
  }
  pi.times_ = std::move(times);
  return pi;
}

Partition Partition::dyadic(double t, int level) {
  if (!(t > 0.0) || level < 0 || level > 40) {
    throw UsageError("dyadic partition needs t > 0 and 0 <= level <= 40");
  }
  const std::size_t m = std::size_t{1} << level;
  const double h = std::ldexp(t, -level);
  Partition pi;
  pi.times_.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    pi.times_[k] = static_cast<double>(k) * h;
  }
  pi.times_[m] = t;
  pi.steps_.assign(m, h);
  return pi;
}

double Partition::mesh() const { return *std::max_element(steps_.begin(), steps_.end()); }

bool Partition::is_refined_by(const Partition& finer) const {
  const auto& fine = finer.times();
  std::size_t j = 0;
  for (double t : times_) {
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    while (j < fine.size() && fine[j] < t - tol) ++j;
    if (j == fine.size() || std::abs(fine[j] - t) > tol) return false;
  }
  return true;
}

GridFunction step_J(const KernelFamily& family, double h, const GridFunction& f, SeriesOptions options) {
  if (!(h > 0.0)) {
    throw UsageError("step_J: h must be > 0");
  }
  return MemberStep::sup_step(family, h, f.grid(), options).apply_max(f);
}

GridFunction apply_partition(const KernelFamily& family, const Partition& pi, const GridFunction& f,
                             SeriesOptions options) {
  // One prepared operator per distinct increment.
  std::vector<MemberStep> cache;
  auto step_for = [&](double h) -> const MemberStep& {
    for (const auto& s : cache) {
      if (std::abs(s.h() - h) <= 1e-12 * h) return s;
    }
    cache.push_back(MemberStep::sup_step(family, h, f.grid(), options));
    return cache.back();
  };
  GridFunction g = f;
  const auto& inc = pi.increments();
  for (auto it = inc.rbegin(); it != inc.rend(); ++it) {
    g = step_for(*it).apply_max(g);
  }
  return g;
}

GridFunction dyadic_iterate(const KernelFamily& family, double t, int level, const GridFunction& f,
                            SeriesOptions options) {
  if (t == 0.0) {
    return f;
  }
  return apply_partition(family, Partition::dyadic(t, level), f, options);
}

double boundary_leakage(const GridFunction& f, const PNorm& norm, double margin) {
  const IndexRange in = interior(f.grid(), margin);
  const double left = lp_norm(f, norm, {0, in.first});
  const double right = lp_norm(f, norm, {in.last, f.size()});
  return std::pow(std::pow(left, norm.p) + std::pow(right, norm.p), 1.0 / norm.p);
}

EnvelopeResult nisio_dyadic(const KernelFamily& family, double t, const GridFunction& f, double tol_rel, int n_max,
                            const PNorm& norm, const EnvelopeParams& params) {
  if (!(t > 0.0)) {
    throw UsageError("nisio_dyadic: t must be > 0");
  }
  if (!(tol_rel > 0.0)) {
    throw UsageError("nisio_dyadic: tol_rel must be > 0");
  }
  if (n_max < 0) {
    throw UsageError("nisio_dyadic: n_max must be >= 0");
  }
  const double threshold = tol_rel * lp_norm(f, norm);
  EnvelopeResult r;
  r.worst_monotonicity = std::numeric_limits<double>::infinity();
  std::optional<GridFunction> prev;
  for (int n = 0; n <= n_max; ++n) {
    GridFunction cur = dyadic_iterate(family, t, n, f, params.series);
    LevelRecord rec;
    rec.level = n;
    rec.steps = std::size_t{1} << n;
    rec.h = std::ldexp(t, -n);
    rec.norm_lp = lp_norm(cur, norm);
    if (prev) {
      const GridFunction diff = cur - *prev;
      rec.increment_lp = lp_norm(diff, norm);
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < diff.size(); ++i) lowest = std::min(lowest, diff[i]);
      rec.min_pointwise_increment = lowest;
      r.worst_monotonicity = std::min(r.worst_monotonicity, lowest);
    }
    r.levels.push_back(rec);
    r.levels_used = n;
    const bool done = rec.increment_lp && *rec.increment_lp <= threshold;
    prev = std::move(cur);
    if (done) {
      r.converged = true;
      break;
    }
  }
  r.final = std::move(*prev);
  r.boundary_leakage = boundary_leakage(r.final, norm, params.boundary_margin);
  const UpperBoundCertificate cert = check_upper_bound(family, t, r, f, norm);
  if (cert.available) {
    r.upper_bound_margin = cert.margin;
  }
  return r;
}

UpperBoundCertificate check_upper_bound(const KernelFamily& family, double t, const EnvelopeResult& result,
                                        const GridFunction& f, const PNorm& norm) {
  UpperBoundCertificate cert;
  if (!family.has_upper_bound() || (family.kind() == FamilyKind::gaussian_drift && norm.q_infinite)) {
    return cert;
  }
  const GridFunction c = upper_bound_C(family, t, f, norm);
  cert.available = true;
  cert.margin = pointwise_leq(result.final, c, 0.0).worst;
  cert.threshold = 1e-6 * (1.0 + f.sup_abs());
  cert.pass = cert.margin <= cert.threshold;
  return cert;
}

}  // namespace semienv
