#pragma once

#include <vector>

#include "semienv/funcspace.hpp"

namespace semienv {

/// e^{-tau} I_k(tau) for k = 0..k_max (modified Bessel functions of the first
/// kind, exponentially scaled), by Miller's backward recurrence normalised
/// with sum_{k in Z} e^{-tau} I_k(tau) = 1.
std::vector<double> scaled_bessel_i(double tau, int k_max);

/// Transition law of the continuous-time nearest-neighbour walk on dx*Z with
/// jump rates e^{+theta dx}/(2dx^2) (right) and e^{-theta dx}/(2dx^2) (left),
/// theta = asinh(lambda dx)/dx, run for time t.
///
/// The law is Skellam: weight(k) = e^{-tau} I_k(tau) e^{theta k dx} / Z with
/// tau = t/dx^2. Its mean is exactly lambda*t and its variance is
/// t*cosh(theta dx). Returned as a Stencil so that apply() evaluates
/// E[f(x + L_t)] with f zero-extended. Tails carrying less than `tail_mass`
/// in total are dropped and the remaining weights renormalised.
Stencil drift_diffusion_kernel(double t, double lambda, double dx, double tail_mass = 1e-18);

/// theta = asinh(lambda*dx)/dx: the tilt giving mean drift lambda.
double lattice_tilt(double lambda, double dx);

/// Growth exponent g with C(h) = e^{h g} (heat_h |f|^p)^{1/p} dominating the
/// tilted walk with drift lambda (Hoelder with conjugate q):
/// g = (cosh(q theta dx) - 1)/(q dx^2) - (cosh(theta dx) - 1)/dx^2.
/// Tends to (q-1) lambda^2 / 2 as dx -> 0.
double lattice_holder_exponent(double lambda, double q, double dx);

/// Poisson(mean) probabilities for n = 0..N where N is the smallest integer
/// whose Chernoff tail bound P(X > N) <= tol, renormalised to sum to 1.
std::vector<double> poisson_weights(double mean, double tol);

}  // namespace semienv
