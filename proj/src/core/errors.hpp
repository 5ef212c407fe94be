#pragma once

#include <stdexcept>
#include <string>

namespace survkit {

// Invalid configuration or usage. Maps to exit code 1 at the CLI boundary.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or degenerate data at runtime (parse failures, undefined metrics,
// dimension mismatches). Maps to exit code 2 at the CLI boundary.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace survkit
