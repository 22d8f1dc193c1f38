#include "semienv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "semienv/error.hpp"
#include "semienv/lattice_kernel.hpp"
#include "semienv/simd.hpp"

namespace semienv {

LambdaSet LambdaSet::interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw ConfigError("lambda_interval must be [lo, hi] with finite lo <= hi", "family.lambda_interval");
  }
  LambdaSet s;
  s.interval_ = true;
  s.values_ = {lo, hi};
  return s;
}

LambdaSet LambdaSet::finite(std::vector<double> values) {
  if (values.empty()) {
    throw ConfigError("lambda_list must be nonempty", "family.lambda_list");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ConfigError("lambda_list entries must be finite", "family.lambda_list");
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  LambdaSet s;
  s.values_ = std::move(values);
  return s;
}

bool LambdaSet::contains(double lambda, double tol) const {
  if (interval_) {
    return lambda >= lo() - tol * (1.0 + std::abs(lo())) && lambda <= hi() + tol * (1.0 + std::abs(hi()));
  }
  return std::any_of(values_.begin(), values_.end(),
                     [&](double v) { return std::abs(v - lambda) <= tol * (1.0 + std::abs(v)); });
}

std::vector<double> LambdaSet::sup_candidates(int interior) const {
  if (!interval_) {
    return values_;
  }
  if (lo() == hi()) {
    return {lo()};
  }
  std::vector<double> out{lo()};
  const int n = std::max(interior, 0);
  for (int k = 1; k <= n; ++k) {
    out.push_back(lo() + (hi() - lo()) * static_cast<double>(k) / static_cast<double>(n + 1));
  }
  out.push_back(hi());
  return out;
}

JumpDistribution JumpDistribution::make(std::vector<JumpAtom> atoms) {
  if (atoms.empty()) {
    throw ConfigError("jump_atoms must be nonempty", "family.jump_atoms");
  }
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.offset) || !std::isfinite(a.weight) || !(a.weight > 0.0)) {
      throw ConfigError("jump atoms need finite offsets and positive weights", "family.jump_atoms");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("jump atom weights must sum to 1", "family.jump_atoms");
  }
  JumpDistribution mu;
  mu.atoms_ = std::move(atoms);
  return mu;
}

double JumpDistribution::truncated_second_moment() const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    m += a.weight * std::min(1.0, a.offset * a.offset);
  }
  return m;
}

double JumpDistribution::small_jump_mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (std::abs(a.offset) <= 1.0) m += a.weight * a.offset;
  }
  return m;
}

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gaussian_drift: return "gaussian_drift";
    case FamilyKind::compound_poisson: return "compound_poisson";
    case FamilyKind::pure_shift: return "pure_shift";
  }
  return "unknown";
}

KernelFamily::KernelFamily(FamilyKind kind, LambdaSet lambdas, std::optional<JumpDistribution> mu, int interior)
    : kind_(kind), lambdas_(std::move(lambdas)), mu_(std::move(mu)), interior_samples_(interior) {}

KernelFamily KernelFamily::gaussian_drift(LambdaSet lambdas) {
  return KernelFamily(FamilyKind::gaussian_drift, std::move(lambdas), std::nullopt, kDefaultGaussianInterior);
}

KernelFamily KernelFamily::compound_poisson(LambdaSet lambdas, JumpDistribution mu) {
  if (lambdas.lo() < 0.0) {
    throw ConfigError("compound_poisson intensities must be >= 0",
                      lambdas.is_interval() ? "family.lambda_interval" : "family.lambda_list");
  }
  return KernelFamily(FamilyKind::compound_poisson, std::move(lambdas), std::move(mu), kDefaultPoissonInterior);
}

KernelFamily KernelFamily::pure_shift(LambdaSet lambdas) {
  return KernelFamily(FamilyKind::pure_shift, std::move(lambdas), std::nullopt, 0);
}

const JumpDistribution& KernelFamily::jumps() const {
  if (!mu_) {
    throw UsageError("only compound_poisson families carry a jump distribution");
  }
  return *mu_;
}

KernelFamily KernelFamily::with_interior_samples(int n) const {
  if (n < 0) {
    throw ConfigError("lambda_interior_samples must be >= 0", "family.lambda_interior_samples");
  }
  KernelFamily copy = *this;
  copy.interior_samples_ = n;
  return copy;
}

LevyTriplet KernelFamily::triplet(double lambda) const {
  switch (kind_) {
    case FamilyKind::gaussian_drift: return {lambda, 1.0, 0.0};
    case FamilyKind::compound_poisson:
      return {lambda * mu_->small_jump_mean(), 0.0, lambda * mu_->truncated_second_moment()};
    case FamilyKind::pure_shift: return {lambda, 0.0, 0.0};
  }
  return {};
}

double KernelFamily::levy_condition_bound() const {
  // Each summary term is affine in lambda, so the endpoints carry the sup.
  double bound = 0.0;
  for (double l : {lambdas_.lo(), lambdas_.hi()}) {
    const LevyTriplet t = triplet(l);
    bound = std::max(bound, std::abs(t.b) + t.sigma2 + t.jump_mass);
  }
  return bound;
}

// ---------------------------------------------------------------------------

MemberStep::MemberStep(const KernelFamily& family, std::vector<double> lambdas, double h, const Grid& grid,
                       SeriesOptions options)
    : kind_(family.kind()), lambdas_(std::move(lambdas)), h_(h), grid_(grid) {
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw UsageError("member step needs a finite h >= 0");
  }
  if (lambdas_.empty()) {
    throw UsageError("member step needs at least one lambda");
  }
  for (double l : lambdas_) {
    if (!family.lambdas().contains(l)) {
      throw UsageError("lambda outside the family's uncertainty set");
    }
  }
  switch (kind_) {
    case FamilyKind::gaussian_drift:
      for (double l : lambdas_) stencils_.push_back(drift_diffusion_kernel(h, l, grid.dx));
      break;
    case FamilyKind::pure_shift:
      for (double l : lambdas_) {
        stencils_.push_back(h == 0.0 ? Stencil::identity() : shift_stencil(l * h, grid.dx));
      }
      break;
    case FamilyKind::compound_poisson:
      for (double l : lambdas_) poisson_.push_back(poisson_weights(l * h, options.series_tol));
      atoms_ = family.jumps().atoms();
      break;
  }
}

MemberStep MemberStep::sup_step(const KernelFamily& family, double h, const Grid& grid, SeriesOptions options) {
  MemberStep step(family, family.sup_candidates(), h, grid, options);
  const LambdaSet& set = family.lambdas();
  if (family.kind() == FamilyKind::pure_shift && set.is_interval() && set.lo() < set.hi() && h > 0.0) {
    step.continuum_shift_ = true;
    step.shift_lo_ = set.lo() * h;
    step.shift_hi_ = set.hi() * h;
  }
  return step;
}

std::vector<GridFunction> MemberStep::jump_powers(const GridFunction& f, std::size_t n_max) const {
  std::vector<GridFunction> powers;
  powers.reserve(n_max + 1);
  powers.push_back(f);
  std::vector<Stencil> shifts;
  for (const auto& a : atoms_) shifts.push_back(shift_stencil(a.offset, grid_.dx));
  for (std::size_t n = 1; n <= n_max; ++n) {
    const GridFunction& prev = powers.back();
    GridFunction next(grid_);
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      const GridFunction moved = semienv::apply(shifts[j], prev);
      simd::axpy(atoms_[j].weight, moved.values(), next.values());
    }
    powers.push_back(std::move(next));
  }
  return powers;
}

GridFunction MemberStep::poisson_sum(const std::vector<double>& w, const std::vector<GridFunction>& powers) const {
  GridFunction out(grid_);
  for (std::size_t n = 0; n < w.size(); ++n) {
    simd::axpy(w[n], powers[n].values(), out.values());
  }
  return out;
}

GridFunction MemberStep::apply(std::size_t which, const GridFunction& f) const {
  if (!(f.grid() == grid_)) {
    throw UsageError("member step built for a different grid");
  }
  if (which >= lambdas_.size()) {
    throw UsageError("member index out of range");
  }
  if (kind_ == FamilyKind::compound_poisson) {
    const auto& w = poisson_[which];
    return poisson_sum(w, jump_powers(f, w.size() - 1));
  }
  return semienv::apply(stencils_[which], f);
}

namespace {

// sup over s in [x_i + lo, x_i + hi] of the piecewise linear interpolant of
// the zero-extended samples: the max of the two window endpoint values and
// of every node strictly inside, by a monotone deque over node indices.
GridFunction window_max(const GridFunction& f, double lo, double hi) {
  const Grid& g = f.grid();
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  GridFunction out = pointwise_max(std::vector<GridFunction>{interp_shift(f, lo), interp_shift(f, hi)});

  const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(std::floor(lo / g.dx)) + 1;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(std::ceil(hi / g.dx)) - 1;
  if (last < first) {
    return out;
  }
  auto value = [&](std::ptrdiff_t j) { return (j < 0 || j >= n) ? 0.0 : f[static_cast<std::size_t>(j)]; };
  std::deque<std::ptrdiff_t> dq;
  std::ptrdiff_t next = first;  // next absolute index to enter the window
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t a = i + first;
    const std::ptrdiff_t b = i + last;
    for (; next <= b; ++next) {
      const double v = value(next);
      while (!dq.empty() && value(dq.back()) <= v) dq.pop_back();
      dq.push_back(next);
    }
    while (dq.front() < a) dq.pop_front();
    auto& o = out[static_cast<std::size_t>(i)];
    o = std::max(o, value(dq.front()));
  }
  return out;
}

}  // namespace

GridFunction MemberStep::apply_max(const GridFunction& f) const {
  if (!(f.grid() == grid_)) {
    throw UsageError("member step built for a different grid");
  }
  if (continuum_shift_) {
    return window_max(f, shift_lo_, shift_hi_);
  }
  if (kind_ == FamilyKind::compound_poisson) {
    std::size_t n_max = 0;
    for (const auto& w : poisson_) n_max = std::max(n_max, w.size() - 1);
    const auto powers = jump_powers(f, n_max);
    GridFunction out = poisson_sum(poisson_[0], powers);
    for (std::size_t k = 1; k < poisson_.size(); ++k) {
      const GridFunction g = poisson_sum(poisson_[k], powers);
      simd::max_inplace(out.values(), g.values());
    }
    return out;
  }
  GridFunction out = semienv::apply(stencils_[0], f);
  for (std::size_t k = 1; k < stencils_.size(); ++k) {
    const GridFunction g = semienv::apply(stencils_[k], f);
    simd::max_inplace(out.values(), g.values());
  }
  return out;
}

// ---------------------------------------------------------------------------

GridFunction heat_convolve(const GridFunction& f, double t) {
  return apply(drift_diffusion_kernel(t, 0.0, f.grid().dx), f);
}

GridFunction jump_average(const JumpDistribution& mu, const GridFunction& f) {
  GridFunction out(f.grid());
  for (const auto& a : mu.atoms()) {
    const GridFunction moved = interp_shift(f, a.offset);
    simd::axpy(a.weight, moved.values(), out.values());
  }
  return out;
}

GridFunction apply_member(const KernelFamily& family, double lambda, double t, const GridFunction& f,
                          SeriesOptions options) {
  if (!(t >= 0.0)) {
    throw UsageError("apply_member: t must be >= 0");
  }
  if (!family.lambdas().contains(lambda)) {
    throw UsageError("apply_member: lambda outside the uncertainty set");
  }
  if (t == 0.0) {
    return f;
  }
  return MemberStep(family, {lambda}, t, f.grid(), options).apply(0, f);
}

GridFunction first_difference(const GridFunction& f) {
  const std::size_t n = f.size();
  const double dx = f.grid().dx;
  GridFunction d(f.grid());
  if (n < 3) {
    const double s = (f[n - 1] - f[0]) / dx;
    for (std::size_t i = 0; i < n; ++i) d[i] = s;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  }
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return d;
}

GridFunction second_difference(const GridFunction& f) {
  const std::size_t n = f.size();
  const double dx2 = f.grid().dx * f.grid().dx;
  GridFunction d(f.grid());
  if (n < 3) {
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / dx2;
  }
  if (n < 4) {
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
  }
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / dx2;
  return d;
}

GridFunction member_generator(const KernelFamily& family, double lambda, const GridFunction& f) {
  switch (family.kind()) {
    case FamilyKind::gaussian_drift:
      return axpby(0.5, second_difference(f), lambda, first_difference(f));
    case FamilyKind::compound_poisson: {
      const GridFunction mf = jump_average(family.jumps(), f);
      return axpby(lambda, mf, -lambda, f);
    }
    case FamilyKind::pure_shift:
      return lambda * first_difference(f);
  }
  return GridFunction(f.grid());
}

GridFunction sup_generator(const KernelFamily& family, const GridFunction& f) {
  // Every generator is affine in lambda, so for an interval the two endpoints
  // carry the supremum.
  const auto& lambdas = family.lambdas().values();
  if (family.kind() == FamilyKind::gaussian_drift) {
    const GridFunction d1 = first_difference(f);
    GridFunction out = 0.5 * second_difference(f);
    for (std::size_t i = 0; i < out.size(); ++i) {
      double best = lambdas.front() * d1[i];
      for (double l : lambdas) best = std::max(best, l * d1[i]);
      out[i] += best;
    }
    return out;
  }
  std::vector<GridFunction> members;
  for (double l : lambdas) members.push_back(member_generator(family, l, f));
  return pointwise_max(members);
}

double upper_bound_factor(const KernelFamily& family, double h, const PNorm& norm, double dx) {
  switch (family.kind()) {
    case FamilyKind::gaussian_drift:
      if (norm.q_infinite) {
        throw UsageError("no finite upper bound C(h) for the Gaussian family at p = 1");
      }
      return std::exp(h * lattice_holder_exponent(family.lambdas().abs_sup(), norm.q, dx));
    case FamilyKind::compound_poisson:
      return std::exp((family.lambdas().hi() - family.lambdas().lo()) * h);
    case FamilyKind::pure_shift:
      break;
  }
  throw UsageError("no envelope bound available: pure_shift has no upper-bound operator");
}

GridFunction upper_bound_C(const KernelFamily& family, double h, const GridFunction& f, const PNorm& norm) {
  if (!(h > 0.0)) {
    throw UsageError("upper_bound_C: h must be > 0");
  }
  const double kappa = upper_bound_factor(family, h, norm, f.grid().dx);
  GridFunction powered(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    powered[i] = norm.p == 2.0 ? a * a : std::pow(a, norm.p);
  }
  GridFunction smoothed = family.kind() == FamilyKind::gaussian_drift
                              ? heat_convolve(powered, h)
                              : apply_member(family, family.lambdas().hi(), h, powered);
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    const double s = std::max(smoothed[i], 0.0);
    smoothed[i] = kappa * (norm.p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / norm.p));
  }
  return smoothed;
}

}  // namespace semienv
