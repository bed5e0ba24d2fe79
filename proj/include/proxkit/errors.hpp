#pragma once

#include <stdexcept>
#include <string>

namespace proxkit {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The least-squares fit is rank deficient or produced a non-physical model.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete input data (CSV rows, unlabeled traces, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid selection or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace proxkit
