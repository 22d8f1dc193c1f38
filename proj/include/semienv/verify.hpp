#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "semienv/reference.hpp"
#include "semienv/report.hpp"

namespace semienv {

struct VerifyOptions {
  /// "small" or "full".
  std::string scale = "small";
  std::uint64_t seed = 20240611;
  /// Numerical Hamiltonian used by the HJB oracle checks; tests swap in a
  /// broken one to confirm the monotonicity check notices.
  UpwindHamiltonian hamiltonian = upwind_abs_gradient;
  /// Extra family descriptions (kernels config keys); each adds one check
  /// running the step_J lattice properties on that family.
  std::vector<nlohmann::json> family_fixtures;
};

/// Runs the property checks of every module with fixed seeds. A check whose
/// setup raises a configuration error is recorded as such and the remaining
/// checks still run.
Report verify_suite(const VerifyOptions& options);

/// Names of the checks verify_suite runs (without fixtures), in order.
std::vector<std::string> verify_check_names();

}  // namespace semienv
