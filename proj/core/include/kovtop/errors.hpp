#pragma once

#include <stdexcept>
#include <string>

namespace kovtop {

// Base class for every failure raised by the library. Subclasses identify the
// precondition that was violated so callers (the CLI in particular) can map
// them onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (tolerances, spacing, names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The Kovalevskaya chart needs |m2| bounded away from zero.
class ChartSingularity : public Error {
 public:
  using Error::Error;
};

// A linear system whose determinant vanishes.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// An input that should lie on a constraint surface does not.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// A time argument that is off the sample grid or too close to its ends for
// the finite-difference stencil.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Coincident roots where a formula divides by their difference.
class RootCollision : public Error {
 public:
  using Error::Error;
};

// Anything numerical that did not converge or produced non-finite values.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public NumericalFailure {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericalFailure(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace kovtop
