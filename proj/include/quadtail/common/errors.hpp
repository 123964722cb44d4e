#pragma once

#include <stdexcept>
#include <string>

namespace quadtail {

/// Violated function precondition (bad sizes, non-unit vectors, dt <= 0, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or unreadable experiment/model configuration. `field` names the
/// offending key path when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Unreadable, corrupt or version-mismatched checkpoint.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical or simulation fault detected at run time (non-finite state,
/// singular mass matrix, non-finite training statistics).
class RuntimeFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace quadtail
