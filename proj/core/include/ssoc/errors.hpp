#pragma once

#include <stdexcept>
#include <string>

namespace ssoc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions disagree with the problem or layout.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A callback produced a non-finite value.
class EvaluationDomainError : public Error {
 public:
  EvaluationDomainError(double t, std::string component)
      : Error("non-finite value in " + component + " at t=" + std::to_string(t)),
        time_(t),
        component_(std::move(component)) {}

  double time() const noexcept { return time_; }
  const std::string& component() const noexcept { return component_; }

 private:
  double time_;
  std::string component_;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Constraint Jacobian lost full row rank.
class ConstraintQualificationError : public Error {
 public:
  using Error::Error;
};

/// The discrete KKT matrix is numerically singular.
class StrongRegularityError : public Error {
 public:
  using Error::Error;
};

/// H_uu is not uniformly positive definite on the tube.
class LegendreError : public Error {
 public:
  using Error::Error;
};

class SolverBreakdown : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace ssoc
