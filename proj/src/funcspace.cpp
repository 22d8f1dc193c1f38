#include "semienv/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "semienv/error.hpp"
#include "semienv/simd.hpp"

namespace semienv {

Grid make_grid(double lower, double upper, std::int64_t n_nodes) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower)) {
    throw ConfigError("grid requires finite bounds with upper > lower", "grid.upper");
  }
  if (n_nodes < 2) {
    throw ConfigError("grid requires n_nodes >= 2", "grid.n_nodes");
  }
  Grid g;
  g.lower = lower;
  g.upper = upper;
  g.n_nodes = static_cast<std::size_t>(n_nodes);
  g.dx = (upper - lower) / static_cast<double>(n_nodes - 1);
  return g;
}

GridFunction::GridFunction(const Grid& grid, double fill) : grid_(grid), values_(grid.n_nodes, fill) {}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_nodes) {
    throw UsageError("sample count does not match grid.n_nodes");
  }
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFunction::sup_abs() const {
  double m = 0.0;
  for (double v : values_) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] -= other.values_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator*=(double a) {
  for (double& v : values_) {
    v *= a;
  }
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double a, GridFunction f) { return f *= a; }

GridFunction axpby(double a, const GridFunction& f, double b, const GridFunction& g) {
  require_same_grid(f, g);
  GridFunction out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = a * f[i] + b * g[i];
  }
  return out;
}

PNorm PNorm::make(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw ConfigError("norm exponent p must be a finite real >= 1", "norm.p");
  }
  PNorm n;
  n.p = p;
  if (p == 1.0) {
    n.q = std::numeric_limits<double>::infinity();
    n.q_infinite = true;
  } else {
    n.q = p / (p - 1.0);
  }
  return n;
}

namespace {

double pow_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

double root(double s, double p) {
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const GridFunction& f, const PNorm& norm, IndexRange range) {
  double s = 0.0;
  const auto v = f.values();
  for (std::size_t i = range.first; i < range.last; ++i) {
    s += pow_abs(v[i], norm.p);
  }
  return root(s * f.grid().dx, norm.p);
}

double lp_norm(const GridFunction& f, const PNorm& norm) {
  return lp_norm(f, norm, IndexRange{0, f.size()});
}

IndexRange interior(const Grid& grid, double margin) {
  const auto drop = static_cast<std::size_t>(std::floor(std::clamp(margin, 0.0, 0.5) * grid.n_nodes));
  if (2 * drop >= grid.n_nodes) {
    return {grid.n_nodes / 2, grid.n_nodes / 2 + 1};
  }
  return {drop, grid.n_nodes - drop};
}

GridFunction apply(const Stencil& stencil, const GridFunction& f) {
  const std::size_t n = f.size();
  const std::size_t taps = stencil.weights.size();
  if (taps == 0) {
    return GridFunction(f.grid());
  }
  // padded[j] holds f_{j + offset}, zero off the grid.
  std::vector<double> padded(n + taps - 1, 0.0);
  const auto src = f.values();
  for (std::size_t j = 0; j < padded.size(); ++j) {
    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(j) + stencil.offset;
    if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n)) {
      padded[j] = src[static_cast<std::size_t>(idx)];
    }
  }
  GridFunction out(f.grid());
  simd::correlate(padded, stencil.weights, out.values());
  return out;
}

Stencil shift_stencil(double delta, double dx) {
  const double s = delta / dx;
  double k = std::floor(s);
  double a = s - k;
  // Shifts by a whole number of cells are pure re-indexing.
  const double nearest = std::round(s);
  if (std::abs(s - nearest) <= 1e-12 * std::max(1.0, std::abs(s))) {
    return {static_cast<std::ptrdiff_t>(nearest), {1.0}};
  }
  return {static_cast<std::ptrdiff_t>(k), {1.0 - a, a}};
}

GridFunction interp_shift(const GridFunction& f, double delta) {
  return apply(shift_stencil(delta, f.grid().dx), f);
}

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) {
    throw UsageError("grid functions live on different grids");
  }
}

GridFunction pointwise_max(std::span<const GridFunction> fs) {
  if (fs.empty()) {
    throw UsageError("pointwise_max of an empty list");
  }
  GridFunction out = fs.front();
  for (std::size_t j = 1; j < fs.size(); ++j) {
    require_same_grid(out, fs[j]);
    simd::max_inplace(out.values(), fs[j].values());
  }
  return out;
}

OrderCheck pointwise_leq(const GridFunction& f, const GridFunction& g, double tol) {
  require_same_grid(f, g);
  OrderCheck r;
  r.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    r.worst = std::max(r.worst, f[i] - g[i]);
  }
  r.holds = r.worst <= tol;
  return r;
}

void write_csv(std::ostream& os, const GridFunction& f) {
  os << "x,value\n";
  char buf[64];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid().node(i), f[i]);
    os << buf;
  }
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,value", 0) != 0) {
    throw ConfigError("grid function CSV must start with header `x,value`");
  }
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("malformed CSV row: " + line);
    }
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("malformed CSV row: " + line);
    }
  }
  if (xs.size() < 2) {
    throw ConfigError("grid function CSV needs at least two rows");
  }
  const Grid grid = make_grid(xs.front(), xs.back(), static_cast<std::int64_t>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.node(i)) > 1e-9 * std::max(1.0, grid.length())) {
      throw ConfigError("grid function CSV x column is not uniform");
    }
  }
  GridFunction f(grid, std::move(vs));
  if (!f.all_finite()) {
    throw ConfigError("grid function CSV contains non-finite samples");
  }
  return f;
}

}  // namespace semienv
