#pragma once

#include <stdexcept>
#include <string>

namespace robustfuse {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Fixed-point iteration failed to reach the requested tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance H X H' + Sigma is numerically singular.
class SingularInnovation : public Error {
 public:
  using Error::Error;
};

/// Covariance is not positive semidefinite within tolerance.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An attack vector is nonzero outside its declared support.
class SparsityViolation : public Error {
 public:
  using Error::Error;
};

/// Kalman gain is not m replicated copies of a single block.
class BlockStructureViolation : public Error {
 public:
  using Error::Error;
};

/// Order-statistic rank is undefined for the given (p, m).
class RankOutOfRange : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace robustfuse
