#pragma once

#include <cstdint>
#include <random>

#include "semienv/funcspace.hpp"

namespace semienv {

/// amplitude * exp(-1 / (1 - ((x - center)/radius)^2)) on |x - center| < radius, else 0.
GridFunction bump(const Grid& grid, double radius, double center = 0.0, double amplitude = 1.0);

/// amplitude * exp(-(x - center)^2 / (2 sigma^2)).
GridFunction gaussian(const Grid& grid, double sigma, double center = 0.0, double amplitude = 1.0);

/// slope * x + offset.
GridFunction ramp(const Grid& grid, double slope = 1.0, double offset = 0.0);

/// White noise smoothed by one lattice heat step of length dx^2, so samples
/// vary on the grid scale without being rough. Deterministic for a given
/// engine state.
GridFunction random_smooth(const Grid& grid, std::mt19937_64& rng);

/// random_smooth restricted to |x - center| < radius by a bump-shaped window.
GridFunction random_smooth_bump(const Grid& grid, std::mt19937_64& rng, double radius, double center = 0.0);

}  // namespace semienv
