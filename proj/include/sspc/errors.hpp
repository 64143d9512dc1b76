#pragma once

#include <stdexcept>
#include <string>

namespace sspc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition supplied by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A symbol or matrix evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Requested model is not representable by the chosen discretization.
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A discretization cannot represent the requested object (aliasing, too coarse a grid).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A mathematical hypothesis of the theory is violated by the input.
///
/// The command-line runner maps this family to exit status 2, everything
/// else to exit status 1.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(const std::string& what, std::string anchor)
      : Error(what), anchor_(std::move(anchor)) {}
  explicit AssumptionViolation(const std::string& what) : Error(what) {}

  /// Label of the hypothesis that failed, e.g. "re.2".
  const std::string& anchor() const noexcept { return anchor_; }

 private:
  std::string anchor_;
};

/// Hamiltonian trajectory left the configured phase-space box.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double escape_time)
      : Error(what), escape_time_(escape_time) {}
  double escape_time() const noexcept { return escape_time_; }

 private:
  double escape_time_;
};

}  // namespace sspc
