#pragma once

#include <stdexcept>
#include <string>

namespace tdcshell {

/// Parameter point or argument outside the admissible domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rank-deficient Jacobian, singular metric or degenerate boundary tangent.
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested derivative order or feature not supported by the discretization.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, int null_space_estimate)
      : std::runtime_error(what), null_space_estimate_(null_space_estimate) {}
  int null_space_estimate() const { return null_space_estimate_; }

 private:
  int null_space_estimate_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tdcshell
