#pragma once

#include <stdexcept>
#include <string>

namespace trajent {

// Invalid input: bad rates, malformed configs, violated step caps.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical breakdown: non-convergence, positivity loss, impossible jumps.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trajent
