#include "semienv/initial_data.hpp"

#include <cmath>

#include "semienv/error.hpp"
#include "semienv/kernels.hpp"

namespace semienv {

GridFunction bump(const Grid& grid, double radius, double center, double amplitude) {
  if (!(radius > 0.0)) {
    throw ConfigError("bump radius must be > 0", "initial.params.radius");
  }
  return GridFunction::sample(grid, [&](double x) {
    const double s = (x - center) / radius;
    const double r = 1.0 - s * s;
    return r > 0.0 ? amplitude * std::exp(-1.0 / r) : 0.0;
  });
}

GridFunction gaussian(const Grid& grid, double sigma, double center, double amplitude) {
  if (!(sigma > 0.0)) {
    throw ConfigError("gaussian sigma must be > 0", "initial.params.sigma");
  }
  return GridFunction::sample(grid, [&](double x) {
    const double s = (x - center) / sigma;
    return amplitude * std::exp(-0.5 * s * s);
  });
}

GridFunction ramp(const Grid& grid, double slope, double offset) {
  return GridFunction::sample(grid, [&](double x) { return slope * x + offset; });
}

GridFunction random_smooth(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GridFunction noise(grid);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise[i] = normal(rng);
  }
  return heat_convolve(noise, grid.dx * grid.dx);
}

GridFunction random_smooth_bump(const Grid& grid, std::mt19937_64& rng, double radius, double center) {
  GridFunction g = random_smooth(grid, rng);
  const GridFunction window = bump(grid, radius, center, std::exp(1.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] *= window[i];
  }
  return g;
}

}  // namespace semienv
