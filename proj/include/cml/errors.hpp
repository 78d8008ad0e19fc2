#pragma once

#include <stdexcept>
#include <string>

namespace cml {

/// Malformed input text (DSL, parameter, scenario or inputs file).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, int line, int column, const std::string& what);

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string source_;
  int line_;
  int column_;
};

/// A user-level mistake that is not a parse error: missing parameter,
/// inconsistent inputs, unknown asset name.
class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
  using NumericalError::NumericalError;
};

/// Coefficient-sign verdict contradicts the numerical spectrum.
class StabilityDisagreement : public NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace cml
