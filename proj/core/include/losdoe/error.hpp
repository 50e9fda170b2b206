#pragma once

#include <stdexcept>
#include <string>

namespace losdoe {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data, arguments, or violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to converge or produced a non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace losdoe
