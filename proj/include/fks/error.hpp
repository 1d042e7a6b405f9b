#pragma once

#include <stdexcept>
#include <string>

namespace fks {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (s < 0, alpha > 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite data where finite data is required.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Scenario document does not match the schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or iteration failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace fks
