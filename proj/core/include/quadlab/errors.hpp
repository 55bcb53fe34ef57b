#pragma once

#include <stdexcept>
#include <string>

namespace quadlab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on spheres (or domains) of different dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The requested case is outside what the implementation supports.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive method ran out of budget before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A point set, rule or family could not be built with the requested properties.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, double detail = 0.0)
      : Error(what), detail_(detail) {}
  /// Residual, achievable count or similar diagnostic, depending on the thrower.
  double detail() const noexcept { return detail_; }

 private:
  double detail_;
};

}  // namespace quadlab
