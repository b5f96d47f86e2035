#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace pendlim {

// Invalid parameter values, empty inputs, degenerate ranges.
class DomainError : public std::invalid_argument {
 public:
  DomainError(std::string parameter, const std::string& what)
      : std::invalid_argument(parameter + ": " + what), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

// A rational function was evaluated at (or within 1e-12 of) a root of its denominator.
class PoleEvaluationError : public DomainError {
 public:
  PoleEvaluationError(std::complex<double> root, const std::string& what)
      : DomainError("s", what), root_(root) {}
  std::complex<double> root() const noexcept { return root_; }

 private:
  std::complex<double> root_;
};

// The RHP zero coincides with the RHP pole; the fragility bound is unbounded.
class FragilitySingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// 1 + L(jw) vanishes on the sampled imaginary axis.
class ClosedLoopImaginaryPoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// ln|T| is -inf (or T non-finite) at a quadrature node.
class IntegrandSingularError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InterpolationNotApplicableError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Nyquist sampling could not settle a winding number.
class StabilityInconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simulation/CLI configuration that violates its invariants.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace pendlim
