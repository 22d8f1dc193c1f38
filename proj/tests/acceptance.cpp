// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "semienv/calculus.hpp"
#include "semienv/envelope.hpp"
#include "semienv/initial_data.hpp"
#include "semienv/reference.hpp"

using namespace semienv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const PNorm kL2 = PNorm::make(2);

KernelFamily uncertain_drift() { return KernelFamily::gaussian_drift(LambdaSet::interval(-1, 1)); }
KernelFamily poisson01() {
  return KernelFamily::compound_poisson(LambdaSet::finite({0.0, 1.0}), JumpDistribution::make({{1.0, 1.0}}));
}

Outcome envelope_vs_hjb() {
  auto distance = [](std::int64_t n, int level) {
    const Grid g = make_grid(-10, 10, n);
    const GridFunction f = bump(g, 1.0);
    const EnvelopeResult r = nisio_dyadic(uncertain_drift(), 0.5, f, 1e-4, level, kL2);
    return compare(hjb_upwind(f, 0.5, 1.0), r.final, kL2, 0.05).rel_err;
  };
  const double coarse = distance(2049, 10);
  const double fine = distance(4097, 11);
  return {coarse <= 5e-2 && fine < coarse, fmt("rel L2 %.3e (2049, n_max 10) -> %.3e (4097, n_max 11)", coarse, fine)};
}

Outcome envelope_vs_ode() {
  const Grid g = make_grid(-10, 10, 2001);
  const GridFunction f = bump(g, 1.0);
  const GridFunction u = ode_reference(poisson01(), f, 1.0, 1e-3);
  auto distance = [&](int level) {
    const GridFunction s = dyadic_iterate(poisson01(), 1.0, level, f);
    return compare(u, s, kL2, 0.05).rel_err;
  };
  const double e8 = distance(8), e9 = distance(9);
  const double ratio = e9 / e8;
  return {e8 <= 1e-2 && ratio >= 0.35 && ratio <= 0.65, fmt("level 8 %.3e, level 9 %.3e, ratio %.3f", e8, e9, ratio)};
}

Outcome c_norm_identities() {
  const Grid g = make_grid(-10, 10, 2049);
  const double h = 0.1;
  const GridFunction f = bump(g, 1.0);
  const double gauss = lp_norm(upper_bound_C(uncertain_drift(), h, f, kL2), kL2) / lp_norm(f, kL2);
  const double gauss_expected = std::exp(kL2.q * h / (2 * kL2.p));
  const GridFunction fc = bump(g, 1.0, -3.0);
  const double cp = lp_norm(upper_bound_C(poisson01(), h, fc, kL2), kL2) / lp_norm(fc, kL2);
  const double cp_expected = std::exp(h);
  const double e1 = std::abs(gauss / gauss_expected - 1), e2 = std::abs(cp / cp_expected - 1);
  return {e1 <= 1e-3 && e2 <= 1e-3,
          fmt("gaussian %.7f vs %.7f (rel %.1e); poisson %.7f vs %.7f (rel %.1e)", gauss, gauss_expected, e1, cp,
              cp_expected, e2)};
}

Outcome refinement_monotone() {
  const Grid g = make_grid(-10, 10, 1001);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::uniform_int_distribution<int> count(0, 5);
  double worst = -INFINITY;
  const std::vector<KernelFamily> fams{uncertain_drift(), poisson01()};
  for (int k = 0; k < 50; ++k) {
    const KernelFamily& fam = fams[static_cast<std::size_t>(k % 2)];
    const GridFunction f = random_smooth_bump(g, rng, 3.0);
    std::vector<double> coarse{0.0, 0.5};
    for (int j = count(rng); j > 0; --j) coarse.push_back(u(rng));
    std::sort(coarse.begin(), coarse.end());
    coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
    std::vector<double> fine = coarse;
    for (int j = 1 + count(rng); j > 0; --j) fine.push_back(u(rng));
    std::sort(fine.begin(), fine.end());
    fine.erase(std::unique(fine.begin(), fine.end()), fine.end());
    const auto a = apply_partition(fam, Partition::from_times(coarse), f);
    const auto b = apply_partition(fam, Partition::from_times(fine), f);
    worst = std::max(worst, pointwise_leq(a, b, 0.0).worst);
  }
  return {worst <= 1e-9, fmt("50 nested pairs, worst violation %.3e", worst)};
}

Outcome semigroup_law() {
  const Grid g = make_grid(-10, 10, 2049);
  const GridFunction f = bump(g, 1.0);
  const KernelFamily fam = uncertain_drift();
  auto defect = [&](int level) {
    const GridFunction whole = dyadic_iterate(fam, 0.5, level, f);
    const GridFunction halves = dyadic_iterate(fam, 0.25, level, dyadic_iterate(fam, 0.25, level, f));
    return lp_norm(whole - halves, kL2) / lp_norm(f, kL2);
  };
  const double d10 = defect(10), d11 = defect(11);
  return {d10 <= 2e-3 && d11 <= 0.7 * d10, fmt("level 10 %.3e, level 11 %.3e (shrink %.0f%%)", d10, d11, 100 * (1 - d11 / d10))};
}

Outcome generator_identity() {
  const Grid g = make_grid(-10, 10, 2049);
  const EnvelopeParams params;
  const GeneratorEstimate e = generator_fd(uncertain_drift(), bump(g, 2.0), 0.1, 6, params, kL2);
  const double ratio = e.errors_vs_B.back() / e.errors_vs_B.front();
  const GeneratorEstimate narrow = generator_fd(uncertain_drift(), bump(g, 1.0), 0.1, 6, params, kL2);
  const double narrow_ratio = narrow.errors_vs_B.back() / narrow.errors_vs_B.front();
  return {e.strictly_decreasing && ratio <= 0.1,
          fmt("bump r=2: %.3e -> %.3e, ratio %.3f, strictly decreasing %s (r=1 ratio %.3f, info)",
              e.errors_vs_B.front(), e.errors_vs_B.back(), ratio, e.strictly_decreasing ? "yes" : "no", narrow_ratio)};
}

Outcome derivative_identities() {
  const Grid g = make_grid(-10, 10, 2049);
  const EnvelopeParams params;
  const GridFunction f = bump(g, 1.0);
  const auto hs = halving_schedule(0.1, 8);
  const auto r = derivative_identity_check(uncertain_drift(), 0.5, f, hs, params, kL2);
  const double gap = std::max({r.gap_forward_plus, r.gap_forward_minus, r.gap_plus_minus});
  const double dev = integral_identity_check(uncertain_drift(), 0.5, f, 33, hs.back(), params, kL2);
  return {gap <= 5e-2 && dev <= 2e-2, fmt("gaps %.2e/%.2e/%.2e, integral deviation %.3e", r.gap_forward_plus,
                                          r.gap_forward_minus, r.gap_plus_minus, dev)};
}

Outcome exact_properties() {
  const Grid g = make_grid(-10, 10, 401);
  EnvelopeParams params;
  params.probe_level = 4;
  const double t = 0.4;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double mono = -INFINITY, convex = -INFINITY, homog = 0.0, quot = -INFINITY, lemma = -INFINITY;
  const std::vector<KernelFamily> fams{uncertain_drift(),
                                       KernelFamily::compound_poisson(LambdaSet::interval(0, 1), JumpDistribution::make({{0.5, 0.5}, {-0.25, 0.5}}))};
  const auto hs = halving_schedule(0.5, 4);
  for (int k = 0; k < 100; ++k) {
    const KernelFamily& fam = fams[static_cast<std::size_t>(k % 2)];
    const GridFunction f = random_smooth_bump(g, rng, 3.0);
    const GridFunction d = random_smooth_bump(g, rng, 3.0);
    GridFunction h = f;
    for (std::size_t i = 0; i < g.n_nodes; ++i) h[i] += std::abs(d[i]);
    const GridFunction sf = probe_envelope(fam, t, f, params);
    const GridFunction sd = probe_envelope(fam, t, d, params);
    mono = std::max(mono, pointwise_leq(sf, probe_envelope(fam, t, h, params), 0.0).worst);

    const double a = unit(rng);
    convex = std::max(convex, pointwise_leq(probe_envelope(fam, t, axpby(a, f, 1 - a, d), params),
                                            axpby(a, sf, 1 - a, sd), 0.0).worst);
    const double c = 0.1 + 5 * unit(rng);
    const GridFunction sc = probe_envelope(fam, t, c * f, params);
    for (std::size_t i = 0; i < g.n_nodes; ++i)
      homog = std::max(homog, std::abs(sc[i] - c * sf[i]) / (1e-300 + std::max(std::abs(c * sf[i]), sf.sup_abs() * c)));

    const DerivativeProbe p = directional_derivative(fam, t, f, d, hs, params, kL2);
    quot = std::max(quot, p.worst_violation);

    const LipschitzReport lr = lipschitz_probe(fam, t, f, 1.0, 4, params, kL2, 1000 + static_cast<std::uint64_t>(k));
    lemma = std::max(lemma, lr.lemma_worst);
  }
  const bool pass = mono <= 0.0 && convex <= 1e-10 && homog <= 1e-10 && quot <= 1e-9 && lemma <= 0.0;
  return {pass, fmt("100 inputs: monotone %.1e, convex %.1e, homogeneous %.1e, quotients/ordering %.1e, "
                    "recentred bound %.1e",
                    mono, convex, homog, quot, lemma)};
}

Outcome counterexample() {
  const Grid g = make_grid(-2, 2, 1600001);
  const auto rows = counterexample_scan(g, 2.0, 0.5, {1e-2, 1e-3, 1e-4, 1e-5});
  double min_ratio = INFINITY, cmin = INFINITY, cmax = 0.0;
  std::string norms;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k > 0) min_ratio = std::min(min_ratio, rows[k].norm_lp / rows[k - 1].norm_lp);
    cmin = std::min(cmin, rows[k].control_norm_lp);
    cmax = std::max(cmax, rows[k].control_norm_lp);
    norms += fmt("%s%.3f", k ? ", " : "", rows[k].norm_lp);
  }
  const double spread = cmax / cmin - 1;
  return {min_ratio >= 1.5 && spread <= 0.05,
          fmt("norms [%s], min ratio %.3f, control spread %.2e", norms.c_str(), min_ratio, spread)};
}

Outcome growth_bounds() {
  const Grid g = make_grid(-10, 10, 2049);
  const EnvelopeParams params;
  std::mt19937_64 rng(10);
  const std::vector<GridFunction> samples{bump(g, 1.0), gaussian(g, 0.5), random_smooth_bump(g, rng, 3.0)};
  const std::vector<double> ts{0.25, 0.5, 0.75, 1.0};
  const GrowthFit gd = growth_bound_estimate(uncertain_drift(), ts, samples, params, kL2);
  const GrowthFit cp = growth_bound_estimate(poisson01(), ts, samples, params, kL2);
  return {gd.omega <= 0.55 && cp.omega <= 1.05,
          fmt("gaussian omega %.3f (M %.3f), poisson omega %.3f (M %.3f)", gd.omega, gd.M, cp.omega, cp.M)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"envelope vs HJB oracle", envelope_vs_hjb},
      {"envelope vs ODE oracle", envelope_vs_ode},
      {"norm identities of C(h)", c_norm_identities},
      {"refinement monotonicity", refinement_monotone},
      {"approximate semigroup law", semigroup_law},
      {"generator identity", generator_identity},
      {"derivative and integral identities", derivative_identities},
      {"lattice and convexity properties", exact_properties},
      {"counterexample divergence", counterexample},
      {"growth bounds", growth_bounds},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[k].second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
