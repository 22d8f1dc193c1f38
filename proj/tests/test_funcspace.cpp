#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "semienv/error.hpp"
#include "semienv/funcspace.hpp"

using namespace semienv;

TEST_CASE("make_grid") {
  const Grid g = make_grid(-10, 10, 2001);
  CHECK(g.dx == doctest::Approx(0.01).epsilon(1e-14));
  const Grid two = make_grid(0, 1, 2);
  CHECK(two.node(0) == 0.0);
  CHECK(two.node(1) == 1.0);
  CHECK(two.dx == 1.0);
  CHECK_THROWS_AS(make_grid(0, 1, 1), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 1, 5), ConfigError);
  try {
    make_grid(0, 1, 1);
  } catch (const ConfigError& e) {
    CHECK(e.key() == "grid.n_nodes");
  }
}

TEST_CASE("lp_norm uses the rectangle rule") {
  const Grid g = make_grid(0, 1, 101);
  const PNorm p2 = PNorm::make(2);
  CHECK(lp_norm(GridFunction(g, 1.0), p2) == doctest::Approx(std::sqrt(1.01)).epsilon(1e-14));
  CHECK(lp_norm(GridFunction(g, 0.0), p2) == 0.0);

  const PNorm p1 = PNorm::make(1);
  CHECK(p1.q_infinite);
  double previous = 1.0;
  for (int n : {101, 1001, 10001}) {
    const Grid gn = make_grid(0, 1, n);
    const double err = std::abs(lp_norm(GridFunction::sample(gn, [](double x) { return x; }), p1) - 0.5);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("PNorm conjugates") {
  const PNorm n = PNorm::make(3);
  CHECK(1.0 / n.p + 1.0 / n.q == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(PNorm::make(0.5), ConfigError);
  CHECK_THROWS_AS(PNorm::make(NAN), ConfigError);
}

TEST_CASE("interp_shift") {
  const Grid g = make_grid(0, 1, 11);
  SUBCASE("constants stay constant on the interior") {
    const GridFunction s = interp_shift(GridFunction(g, 3.0), 0.037);
    for (std::size_t i = 0; i + 1 < g.n_nodes; ++i) CHECK(s[i] == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("whole-cell shifts re-index") {
    const GridFunction f = GridFunction::sample(g, [](double x) { return x * x; });
    const GridFunction s = interp_shift(f, 3 * g.dx);
    for (std::size_t i = 0; i + 3 < g.n_nodes; ++i) CHECK(s[i] == f[i + 3]);
    for (std::size_t i = g.n_nodes - 3; i < g.n_nodes; ++i) CHECK(s[i] == 0.0);
  }
  SUBCASE("linear data is reproduced") {
    const GridFunction f = GridFunction::sample(g, [](double x) { return x; });
    const GridFunction s = interp_shift(f, 0.05);
    for (std::size_t i = 0; i + 1 < g.n_nodes; ++i) CHECK(s[i] == doctest::Approx(g.node(i) + 0.05).epsilon(1e-14));
  }
  SUBCASE("monotone and linear") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    GridFunction f(g), h(g);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
      f[i] = d(rng);
      h[i] = f[i] + std::abs(d(rng));
    }
    CHECK(pointwise_leq(interp_shift(f, -0.123), interp_shift(h, -0.123), 0.0).holds);
    const GridFunction lhs = interp_shift(axpby(2.0, f, -0.5, h), 0.071);
    const GridFunction rhs = axpby(2.0, interp_shift(f, 0.071), -0.5, interp_shift(h, 0.071));
    for (std::size_t i = 0; i < g.n_nodes; ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-14 * (1 + std::abs(rhs[i])));
  }
}

TEST_CASE("lp_norm is absolutely homogeneous") {
  const Grid g = make_grid(-1, 1, 257);
  const GridFunction f = GridFunction::sample(g, [](double x) { return std::sin(5 * x) + x; });
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const PNorm n = PNorm::make(p);
    CHECK(lp_norm(-3.5 * f, n) == doctest::Approx(3.5 * lp_norm(f, n)).epsilon(1e-12));
  }
}

TEST_CASE("pointwise_max") {
  const Grid g = make_grid(0, 2, 3);
  const GridFunction a(g, {0, 1, 2}), b(g, {2, 0, 1}), c(g, {1, 2, 0});
  const GridFunction m = pointwise_max(std::vector<GridFunction>{a, b, c});
  for (std::size_t i = 0; i < 3; ++i) CHECK(m[i] == 2.0);
  const GridFunction same = pointwise_max(std::vector<GridFunction>{a, a});
  CHECK(std::equal(same.values().begin(), same.values().end(), a.values().begin()));
  CHECK_THROWS_AS(pointwise_max(std::vector<GridFunction>{}), UsageError);
  const GridFunction other(make_grid(0, 1, 3));
  CHECK_THROWS_AS(pointwise_max(std::vector<GridFunction>{a, other}), UsageError);
}

TEST_CASE("pointwise_leq") {
  const Grid g = make_grid(0, 1, 2);
  const GridFunction f(g, {0, 2}), h(g, {1, 1});
  const OrderCheck r = pointwise_leq(f, h, 0.0);
  CHECK_FALSE(r.holds);
  CHECK(r.worst == 1.0);
  CHECK(pointwise_leq(f, f, 0.0).holds);
  CHECK(pointwise_leq(GridFunction(g, 0.0), GridFunction(g, -1e-12), 1e-9).holds);
}

TEST_CASE("interior drops a fraction of nodes per side") {
  const Grid g = make_grid(0, 1, 101);
  const IndexRange r = interior(g, 0.05);
  CHECK(r.first == 5);
  CHECK(r.last == 96);
}

TEST_CASE("csv round trip") {
  const Grid g = make_grid(-1, 1, 17);
  const GridFunction f = GridFunction::sample(g, [](double x) { return std::exp(x) / 3.0; });
  std::stringstream ss;
  write_csv(ss, f);
  CHECK(ss.str().rfind("x,value\n", 0) == 0);
  const GridFunction back = read_csv(ss);
  CHECK(back.grid().n_nodes == 17);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

  std::stringstream bad("x,value\n0,1\n0.3,2\n1,3\n");
  CHECK_THROWS_AS(read_csv(bad), ConfigError);
  std::stringstream header("a,b\n0,1\n");
  CHECK_THROWS_AS(read_csv(header), ConfigError);
}
