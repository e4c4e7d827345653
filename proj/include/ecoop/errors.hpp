#pragma once

#include <stdexcept>
#include <string>

namespace ecoop {

/// Dimension or partition constraints cannot be met (e.g. K > M*N, K_i > M).
class FeasibilityError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Channel geometry too close to singular for zero-forcing.
class DegeneracyError : public std::runtime_error {
public:
  DegeneracyError(const std::string& what, int mt) : std::runtime_error(what), mt_(mt) {}
  int mt() const noexcept { return mt_; }

private:
  int mt_;
};

/// Input violates a documented precondition.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Internal consistency check failed (e.g. transfer LP infeasible for a supposedly optimal power vector).
class ConsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario / profile file problems. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ecoop
