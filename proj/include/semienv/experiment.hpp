#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semienv/envelope.hpp"
#include "semienv/funcspace.hpp"
#include "semienv/kernels.hpp"
#include "semienv/report.hpp"

namespace semienv {

struct InitialSpec {
  std::string kind = "bump";
  double radius = 1.0;
  double center = 0.0;
  double amplitude = 1.0;
  double sigma = 1.0;
  double slope = 1.0;
  double offset = 0.0;
  std::filesystem::path csv_path;
};

struct GeneratorSection {
  double h0 = 0.1;
  int halvings = 6;
  double max_ratio = 0.1;
};

struct DerivativeSection {
  double t = 0.5;
  double h0 = 0.1;
  int halvings = 8;
  int quad_nodes = 33;
  double identity_tol = 5e-2;
  double integral_tol = 2e-2;
};

struct HjbSection {
  double cfl = 0.9;
  double tolerance = 5e-2;
};

struct OdeSection {
  double dt = 1e-3;
  int level = 8;
  double tolerance = 1e-2;
};

struct CounterexampleSection {
  double t = 0.5;
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4, 1e-5};
  double min_ratio = 1.5;
  double control_tol = 0.05;
};

/// A validated experiment description. Every numeric field has been checked
/// against the preconditions of the module that consumes it.
struct ExperimentConfig {
  Grid grid;
  PNorm norm;
  KernelFamily family = KernelFamily::gaussian_drift(LambdaSet::interval(-1.0, 1.0));
  InitialSpec initial;
  double t = 0.5;
  double tol_rel = 1e-4;
  int n_max = 12;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "semienv_out";
  EnvelopeParams envelope;
  GeneratorSection generator;
  DerivativeSection derivative;
  HjbSection hjb;
  OdeSection ode;
  CounterexampleSection counterexample;
  /// The configuration as read, with command-line overrides applied.
  nlohmann::json echo;
};

/// Relative paths inside the config (custom_csv) resolve against base_dir.
/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds only the family from a JSON object with the kernels keys.
KernelFamily parse_family(const nlohmann::json& j);

GridFunction make_initial(const ExperimentConfig& cfg);

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::string scale = "small";
};

struct RunResult {
  int exit_code = 0;
  std::string summary;
};

inline constexpr const char* kSubcommands[] = {"envelope",    "generator",      "derivative", "compare-hjb",
                                               "compare-ode", "counterexample", "verify"};

/// Runs one subcommand end to end. Artifacts are written only after every
/// computation has finished, so a configuration error leaves no files.
/// Exit codes: 0 all checks pass, 1 some check failed, 2 configuration error.
RunResult run(const std::string& subcommand, const std::filesystem::path& config_path, const RunOptions& options);

}  // namespace semienv
