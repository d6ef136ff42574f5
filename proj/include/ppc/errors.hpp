#pragma once

#include <stdexcept>
#include <string>

namespace ppc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A domain object failed its construction-time invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A selection member has no peer inside the selection.
class InfeasibleSelectionError : public Error {
 public:
  using Error::Error;
};

// An operation needed at least one peer for a node that has none.
class IsolatedNodeError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration requested beyond the configured cap.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

class InvalidAlphaError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppc
