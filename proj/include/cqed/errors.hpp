#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

/// Bad user input: schema violations, out-of-range indices, invalid step sizes.
/// The CLI maps this family to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A physically inconsistent request: resonance not met, degenerate detuning,
/// ambiguous dressing, uncalibrated protocol. Exit code 1.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical integration went wrong (norm drift beyond tolerance).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqed
