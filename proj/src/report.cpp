#include "semienv/report.hpp"

#include <algorithm>

#ifndef SEMIENV_VERSION
#define SEMIENV_VERSION "0.0.0"
#endif

namespace semienv {

Check make_check(std::string name, bool pass, double value, double tolerance, std::string detail) {
  return Check{std::move(name), pass ? CheckStatus::pass : CheckStatus::fail, value, tolerance, std::move(detail)};
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::config_error: return "config_error";
  }
  return "unknown";
}

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

nlohmann::json Report::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"status", to_string(c.status)},
                           {"pass", c.passed()},
                           {"value", c.value},
                           {"tolerance", c.tolerance},
                           {"detail", c.detail}});
  }
  return {{"subcommand", subcommand},
          {"status", all_passed() ? "pass" : "fail"},
          {"config", config},
          {"checks", checks_json},
          {"metrics", metrics},
          {"provenance", {{"version", version}, {"seed", seed}}}};
}

const char* library_version() { return SEMIENV_VERSION; }

}  // namespace semienv
