#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace semienv {

enum class CheckStatus { pass, fail, config_error };

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double value = 0.0;
  double tolerance = 0.0;
  /// Free text: the comparison made, or the configuration error message.
  std::string detail;

  bool passed() const { return status == CheckStatus::pass; }
};

Check make_check(std::string name, bool pass, double value, double tolerance, std::string detail = {});

/// Everything that goes into report.json. Timings are kept apart so that the
/// report bytes depend only on (config, seed, version).
struct Report {
  std::string subcommand;
  nlohmann::json config;
  std::vector<Check> checks;
  nlohmann::json metrics = nlohmann::json::object();
  std::string version;
  std::uint64_t seed = 0;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

std::string to_string(CheckStatus status);

const char* library_version();

}  // namespace semienv
