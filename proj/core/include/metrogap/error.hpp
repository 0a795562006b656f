#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metrogap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or a family parameter was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The target function is not strictly positive (or not finite) at a state.
class NonPositiveTarget : public InvalidArgument {
 public:
  NonPositiveTarget(std::size_t state, double value);
  std::size_t state() const { return state_; }
  double value() const { return value_; }

 private:
  std::size_t state_;
  double value_;
};

/// An iterative solver stopped before reaching its tolerance. Carries the
/// best estimate seen so far so callers can decide what to do with it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double residual)
      : Error(what), best_estimate_(best_estimate), residual_(residual) {}
  double best_estimate() const { return best_estimate_; }
  double residual() const { return residual_; }

 private:
  double best_estimate_;
  double residual_;
};

/// A configured size cap (dense solver, pair enumeration) would be exceeded.
/// `partial` holds whatever partial value was computed before refusing; it is
/// never a certificate.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, double partial = 0.0) : Error(what), partial_(partial) {}
  double partial() const { return partial_; }

 private:
  double partial_;
};

}  // namespace metrogap
