#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cyclic {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index or offset outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Shapes that do not line up (row counts, shift lengths, empty inputs).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value outside the domain of a function (non-finite entries, p outside (0,1), unknown states).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when no line applies.
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Null model that is not ergodic or violates the consistency conditions.
class ConditionError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration refused because m^n exceeds the configured budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, unsigned long long budget) : Error(what), budget_(budget) {}
  unsigned long long budget() const noexcept { return budget_; }

 private:
  unsigned long long budget_;
};

/// JSON document that does not match the expected schema or version.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace cyclic
