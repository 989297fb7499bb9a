#pragma once

#include <stdexcept>
#include <string>

namespace entgap {

// Every library failure derives from Error so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct InvalidDimension : DomainError {
  using DomainError::DomainError;
};

/// Raised when conjugation by a gate does not map Pauli products to Pauli
/// products; such gates have no Markov map on squared coefficients.
struct NotPauliPreserving : Error {
  using Error::Error;
};

struct UnsupportedGate : DomainError {
  using DomainError::DomainError;
};

/// The Schmidt factors lack the two-dimensional common kernel, so the
/// spin-1/2 reduction does not apply.
struct ReductionUnavailable : Error {
  using Error::Error;
};

struct CapExceeded : Error {
  using Error::Error;
};

struct NotConverged : Error {
  using Error::Error;
};

}  // namespace entgap
