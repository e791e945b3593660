#pragma once

#include <stdexcept>
#include <string>

namespace epinet {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Exact-solver state-space caps. The message points callers at the
// Monte Carlo path, which has no such limit.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

// Iteration caps, step underflow and other numerical failures.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace epinet
