#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ellcert {

/// Malformed problem document or expression. Carries a 1-based line and column.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(format(message, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  static std::string format(const std::string& message, int line, int column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  int line_;
  int column_;
};

/// A coefficient admissibility check failed. `witness` is the offending point.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string check, const std::string& message, std::vector<double> witness = {})
      : std::runtime_error(message), check_(std::move(check)), witness_(std::move(witness)) {}

  const std::string& check() const noexcept { return check_; }
  const std::vector<double>& witness() const noexcept { return witness_; }

private:
  std::string check_;
  std::vector<double> witness_;
};

/// Expression produced a non-finite value at a sampled point.
class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const std::string& message, std::vector<double> point)
      : std::runtime_error(message), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

private:
  std::vector<double> point_;
};

class SolverError : public std::runtime_error {
public:
  enum class Kind { breakdown, not_converged, dimension_mismatch };

  SolverError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// The weight construction produced a non-positive value on the closed box.
class PositivityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ellcert
