#pragma once

#include <stdexcept>
#include <string>

namespace fermi_landauer {

// Invalid argument or out-of-range physical parameter.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Root finder, quadrature or integrator failed to meet its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The second-order expansion is no longer trustworthy for these inputs
// (coupling too strong or interaction too long).
class PerturbationBreakdown : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Bad command line or config file; carries the offending key when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  explicit ConfigError(const std::string& message)
      : std::runtime_error(message) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace fermi_landauer
