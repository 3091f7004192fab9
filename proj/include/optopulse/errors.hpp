#pragma once

#include <stdexcept>
#include <string>

namespace optopulse {

// Malformed scenario, schedule, or CLI input. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A run left its numerical validity envelope (unstable integration, state norm
// drift, truncation overflow). The CLI maps this to exit code 3.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace optopulse
