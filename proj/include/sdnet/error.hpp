#pragma once

#include <stdexcept>
#include <string>

namespace sdnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A dense N x N allocation would exceed the configured memory cap.
class MemoryCapExceeded : public Error {
 public:
  using Error::Error;
};

/// Root bracketing for the characteristic distance did not find a sign change.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace sdnet
