#pragma once

#include <stdexcept>
#include <string>

namespace pdls {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match the operation's contract.
struct DimensionError : Error {
  using Error::Error;
};

/// Bad argument value (non-positive parameter, empty input, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

/// Malformed input text (Matrix Market, CSV, manifest).
struct ParseError : Error {
  using Error::Error;
};

/// File could not be opened/read/written.
struct IoError : Error {
  using Error::Error;
};

/// A factorization hit a non-positive pivot.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// Assumption 1 does not hold: the Gram matrix is rank deficient.
struct AssumptionViolated : Error {
  using Error::Error;
};

/// Synchronous-protocol violation (missing or duplicated agent reply).
struct ProtocolError : Error {
  using Error::Error;
};

}  // namespace pdls
