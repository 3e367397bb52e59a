#ifndef WSNF_CORE_ERROR_HPP
#define WSNF_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wsnf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An operation produced NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Training loss became non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Aggregation scheme is not defined for the model variant.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsnf

#endif  // WSNF_CORE_ERROR_HPP
