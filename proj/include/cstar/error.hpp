#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cstar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different algebras, or an element does not conform to its spec.
class SpecMismatchError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition (bad shape, constant estimator, N < 1, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A parameter point lies outside the model's chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra step failed: singular matrix, rank-deficient basis, unsolvable SLD.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The SLD equation has no solution: the tangent has support on forbidden (kernel) directions.
class UnsolvableSldError : public NumericalError {
 public:
  UnsolvableSldError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A measurement is not regular at the requested point (some outcome probability is ~0).
class NonRegularError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The estimator is not stationary at the requested point, so the Hessian form is undefined.
class NonStationaryError : public Error {
 public:
  NonStationaryError(const std::string& what, std::vector<double> residual)
      : Error(what), residual_(std::move(residual)) {}
  const std::vector<double>& residual() const noexcept { return residual_; }

 private:
  std::vector<double> residual_;
};

}  // namespace cstar
