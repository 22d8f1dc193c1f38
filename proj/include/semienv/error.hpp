#pragma once

#include <stdexcept>
#include <string>

namespace semienv {

/// Invalid user-supplied configuration (grid, family, config file keys).
/// `key()` names the offending configuration entry when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A call that violates an operation's precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace semienv
