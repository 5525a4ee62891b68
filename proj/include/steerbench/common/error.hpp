#pragma once

#include <stdexcept>
#include <string>

namespace steerbench {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold
// (missing artifacts, degenerate input data, shape mismatches).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// File-system or serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace steerbench
