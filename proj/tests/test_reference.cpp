#include <doctest.h>

#include <cmath>
#include <random>

#include "semienv/error.hpp"
#include "semienv/initial_data.hpp"
#include "semienv/reference.hpp"

using namespace semienv;

namespace {

// Continuum heat solution by quadrature of the Gaussian kernel against the
// bump on a much finer grid.
GridFunction exact_heat(const Grid& g, double radius, double t) {
  const int m = 20000;
  const double dy = 2 * radius / m;
  std::vector<double> ys, ws;
  for (int k = 1; k < m; ++k) {
    const double y = -radius + k * dy;
    const double z = y / radius;
    ys.push_back(y);
    ws.push_back(std::exp(-1.0 / (1.0 - z * z)) * dy);
  }
  return GridFunction::sample(g, [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double d = x - ys[k];
      s += ws[k] * std::exp(-d * d / (2 * t));
    }
    return s / std::sqrt(2 * M_PI * t);
  });
}

double downwind(double d_plus, double d_minus, double lambda_bar) {
  return -upwind_abs_gradient(d_plus, d_minus, lambda_bar);
}

}  // namespace

TEST_CASE("hjb_upwind without drift solves the heat equation") {
  const Grid g = make_grid(-10, 10, 2001);
  const PNorm p2 = PNorm::make(2);
  const GridFunction u = hjb_upwind(bump(g, 1.0), 0.5, 0.0);
  CHECK(compare(exact_heat(g, 1.0, 0.5), u, p2, 0.05).rel_err <= 1e-3);
}

TEST_CASE("hjb_upwind keeps constants and order") {
  const Grid g = make_grid(-10, 10, 401);
  const IndexRange in = interior(g, 0.4);
  const GridFunction c = hjb_upwind(GridFunction(g, 2.0), 0.3, 1.5);
  for (std::size_t i = in.first; i < in.last; ++i) CHECK(c[i] == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const GridFunction f = random_smooth_bump(g, rng, 2.0);
    const GridFunction d = random_smooth_bump(g, rng, 2.0);
    GridFunction h = f;
    for (std::size_t i = 0; i < g.n_nodes; ++i) h[i] += std::abs(d[i]);
    CHECK(pointwise_leq(hjb_upwind(f, 0.2, 1.0), hjb_upwind(h, 0.2, 1.0), 1e-12).holds);
  }
}

TEST_CASE("a downwind hamiltonian breaks monotonicity") {
  const Grid g = make_grid(-5, 5, 41);
  std::mt19937_64 rng(6);
  bool broken = false;
  for (int k = 0; k < 20 && !broken; ++k) {
    const GridFunction f = random_smooth_bump(g, rng, 3.0);
    const GridFunction d = random_smooth_bump(g, rng, 3.0);
    GridFunction h = f;
    for (std::size_t i = 0; i < g.n_nodes; ++i) h[i] += std::abs(d[i]);
    broken = !pointwise_leq(hjb_upwind(f, 0.5, 4.0, 1.0, downwind), hjb_upwind(h, 0.5, 4.0, 1.0, downwind), 1e-12).holds;
  }
  CHECK(broken);
}

TEST_CASE("ode_reference") {
  const Grid g = make_grid(-10, 10, 1001);
  const GridFunction f = bump(g, 1.0, -3.0);
  const auto mu = JumpDistribution::make({{1.0, 1.0}});

  const auto zero = KernelFamily::compound_poisson(LambdaSet::finite({0.0}), mu);
  const GridFunction u0 = ode_reference(zero, f, 1.0, 1e-2);
  for (std::size_t i = 0; i < g.n_nodes; ++i) CHECK(u0[i] == f[i]);

  const auto one = KernelFamily::compound_poisson(LambdaSet::finite({1.5}), mu);
  const GridFunction series = apply_member(one, 1.5, 1.0, f);
  const GridFunction u = ode_reference(one, f, 1.0, 1e-3);
  double err = 0.0;
  for (std::size_t i = 0; i < g.n_nodes; ++i) err = std::max(err, std::abs(u[i] - series[i]));
  CHECK(err <= 1e-8);

  const GridFunction fine = ode_reference(one, f, 1.0, 0.0125);
  const PNorm p2 = PNorm::make(2);
  const double e1 = lp_norm(ode_reference(one, f, 1.0, 0.1) - series, p2);
  const double e2 = lp_norm(ode_reference(one, f, 1.0, 0.05) - series, p2);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
  CHECK(lp_norm(fine - series, p2) < e2);

  CHECK_THROWS_AS(ode_reference(KernelFamily::gaussian_drift(LambdaSet::interval(-1, 1)), f, 1.0, 1e-2), UsageError);
}

TEST_CASE("counterexample_scan") {
  const Grid g = make_grid(-2, 2, 16001);
  const double p = 2.0, t = 0.5;

  SUBCASE("norms grow as epsilon shrinks") {
    const auto rows = counterexample_scan(g, p, t, {1e-2, 1e-3});
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].norm_lp / rows[0].norm_lp >= 1.5);
    CHECK(rows[1].control_norm_lp == doctest::Approx(rows[0].control_norm_lp).epsilon(0.05));
  }

  SUBCASE("the zero shift leaves the profile alone") {
    const auto rows = counterexample_scan(g, p, t, {1e-2, 1e-3}, LambdaSet::finite({0.0}));
    const PNorm p2 = PNorm::make(p);
    for (const auto& r : rows) CHECK(r.norm_lp == lp_norm(singular_profile(g, p, r.epsilon), p2));
  }

  SUBCASE("under-resolved epsilon is a configuration error") {
    try {
      counterexample_scan(g, p, t, {1e-2, 1e-5});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "grid.n_nodes");
      CHECK(std::string(e.what()).find("n_nodes") != std::string::npos);
    }
    CHECK_THROWS_AS(counterexample_scan(make_grid(-1.2, 1.2, 2001), p, t, {1e-2}), ConfigError);
    CHECK_THROWS_AS(counterexample_scan(g, p, t, {1e-3, 1e-2}), ConfigError);
  }
}

TEST_CASE("compare") {
  const Grid g = make_grid(0, 1, 101);
  const PNorm p2 = PNorm::make(2);
  const GridFunction f = GridFunction::sample(g, [](double x) { return std::sin(3 * x); });
  const Comparison same = compare(f, f, p2, 0.1);
  CHECK(same.abs_err == 0.0);
  CHECK(same.rel_err == 0.0);
  CHECK(same.max_err == 0.0);

  const Comparison off = compare(f, f + GridFunction(g, 0.25), p2, 0.1);
  const IndexRange r = interior(g, 0.1);
  CHECK(off.max_err == doctest::Approx(0.25));
  CHECK(off.abs_err == doctest::Approx(0.25 * std::sqrt(r.size() * g.dx)));

  const Comparison zero = compare(GridFunction(g), GridFunction(g, 1.0), p2, 0.1);
  CHECK(zero.rel_err == doctest::Approx(zero.abs_err / 1e-14));
}
