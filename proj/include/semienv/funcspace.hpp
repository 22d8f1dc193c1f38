#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace semienv {

/// Uniform mesh on [lower, upper] with nodes x_i = lower + i*dx.
struct Grid {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t n_nodes = 2;
  double dx = 1.0;

  double node(std::size_t i) const { return lower + static_cast<double>(i) * dx; }
  double length() const { return upper - lower; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws ConfigError unless upper > lower and n_nodes >= 2.
Grid make_grid(double lower, double upper, std::int64_t n_nodes);

/// A real function sampled on the nodes of a Grid.
class GridFunction {
 public:
  GridFunction() : GridFunction(Grid{}) {}
  explicit GridFunction(const Grid& grid, double fill = 0.0);
  GridFunction(const Grid& grid, std::vector<double> values);

  template <class F>
  static GridFunction sample(const Grid& grid, F&& fn) {
    GridFunction out(grid);
    for (std::size_t i = 0; i < grid.n_nodes; ++i) {
      out.values_[i] = fn(grid.node(i));
    }
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;
  double sup_abs() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double a);

 private:
  Grid grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double a, GridFunction f);

/// a*f + b*g, evaluated node by node as (a*f_i) + (b*g_i).
GridFunction axpby(double a, const GridFunction& f, double b, const GridFunction& g);

/// Exponent p of L^p together with its conjugate q (1/p + 1/q = 1).
struct PNorm {
  double p = 2.0;
  double q = 2.0;
  bool q_infinite = false;

  /// Throws ConfigError for p < 1 or non-finite p.
  static PNorm make(double p);
};

/// Rectangle-rule (sum_i |f_i|^p dx)^(1/p), summed left to right.
double lp_norm(const GridFunction& f, const PNorm& norm);

/// Half-open index range [first, last).
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first; }
};

/// Nodes left after dropping floor(margin * n_nodes) nodes on each side.
IndexRange interior(const Grid& grid, double margin);

/// lp_norm restricted to the nodes in `range`.
double lp_norm(const GridFunction& f, const PNorm& norm, IndexRange range);

/// A banded translation-invariant linear map with zero extension:
/// g_i = sum_k weights[k] * f_{i + offset + k}, where f_j = 0 off the grid.
struct Stencil {
  std::ptrdiff_t offset = 0;
  std::vector<double> weights;

  static Stencil identity() { return {0, {1.0}}; }
};

GridFunction apply(const Stencil& stencil, const GridFunction& f);

/// g_i = value at x_i + delta of the piecewise linear interpolant of the
/// zero-extended node sequence. Linear, order preserving, exact for
/// delta = k*dx.
GridFunction interp_shift(const GridFunction& f, double delta);

/// The two-tap stencil used by interp_shift.
Stencil shift_stencil(double delta, double dx);

/// Node-wise maximum of a nonempty list of functions on one grid.
GridFunction pointwise_max(std::span<const GridFunction> fs);

struct OrderCheck {
  bool holds = true;
  double worst = 0.0;  ///< max_i (f_i - g_i)
};

/// f <= g + tol at every node.
OrderCheck pointwise_leq(const GridFunction& f, const GridFunction& g, double tol);

/// Throws UsageError when the grids differ.
void require_same_grid(const GridFunction& f, const GridFunction& g);

/// CSV with header `x,value`, one row per node, 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& f);

/// Reads the format produced by write_csv; the grid is reconstructed from the
/// x column, which must be uniform. Throws ConfigError on malformed input.
GridFunction read_csv(std::istream& is);

}  // namespace semienv
