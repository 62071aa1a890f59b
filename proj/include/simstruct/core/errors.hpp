#pragma once

#include <stdexcept>
#include <string>

namespace simstruct {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidBipartition : public Error {
 public:
  using Error::Error;
};

/// An iterative routine did not converge or produced non-finite values.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The signal has a vanishing norm where a positive one is required.
class DegenerateSignal : public Error {
 public:
  using Error::Error;
};

/// A measurement map whose Gram matrix A A^H is (numerically) singular.
class DegenerateMap : public Error {
 public:
  using Error::Error;
};

class BoundNotApplicable : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace simstruct
