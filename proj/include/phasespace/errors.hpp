#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phasespace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed values that violate a precondition (mismatched hbar,
/// unnormalized state, bad weights, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Operator or Hamiltonian text does not match the grammar.
class ParseError : public InvalidInput {
 public:
  ParseError(std::size_t position, const std::string& message)
      : InvalidInput("parse error at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A state or field does not decay inside its grid.
class DomainTruncation : public Error {
 public:
  using Error::Error;
};

/// Grid combinations that cannot resolve the requested transform.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Operator degree too high for the grid's spectral resolution.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Time step too large for the explicit integrator, or a run blew up.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& message, double offending_dt, double suggested_dt)
      : Error(message), offending_dt_(offending_dt), suggested_dt_(suggested_dt) {}

  double offending_dt() const { return offending_dt_; }
  double suggested_dt() const { return suggested_dt_; }

 private:
  double offending_dt_;
  double suggested_dt_;
};

/// Hamiltonian shape not supported by the requested solver.
class UnsupportedHamiltonian : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV/JSON input.
class FileFormatError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

}  // namespace phasespace
