#pragma once

#include <stdexcept>
#include <string>

namespace robinlab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (mesh files, configs).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a structural invariant (inverted cell, dangling facet, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its admissible range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical stage could not produce a trustworthy result
/// (non-convergence, singular resolvent, divergent tail, lost definiteness).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A Davies phase function violates the A-weighted gradient constraint.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration problem; carries the offending line and field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string field = {})
      : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& message, int line, const std::string& field) {
    std::string out = "config error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " [" + field + "]";
    return out + ": " + message;
  }

  int line_;
  std::string field_;
};

}  // namespace robinlab
