#pragma once

#include <stdexcept>
#include <string>

namespace kpicc {

// Raised for malformed inputs: bad files, invalid configs, oversize frames.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad command-line or study request (unknown study name, missing option).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace kpicc
