#pragma once

#include <stdexcept>
#include <string>

namespace lle {

// Error taxonomy. The CLI maps these onto exit codes: usage errors are
// handled by the argument parser (1), DataError and subclasses exit 2,
// NumericalError exits 3.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : Error {
  using Error::Error;
};

struct IoError : DataError {
  using DataError::DataError;
};

struct FormatError : DataError {
  using DataError::DataError;
};

struct ShapeError : DataError {
  using DataError::DataError;
};

struct PairingError : DataError {
  using DataError::DataError;
};

struct CheckpointError : DataError {
  using DataError::DataError;
};

struct IncompatibilityError : DataError {
  using DataError::DataError;
};

struct ConfigError : DataError {
  using DataError::DataError;
};

struct DegenerateInputError : DataError {
  using DataError::DataError;
};

struct NumericalError : Error {
  using Error::Error;
};

}  // namespace lle
