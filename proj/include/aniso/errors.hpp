#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the validity range of a function (e.g. phi outside [r_min, r_max]).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain (r <= 0, t <= 0, point not in D).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed argument (bad permutation, delta > s, mismatched dimensions).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Data violates a structural invariant (non-monotone table, no admissible exponent).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Quadrature or root-finding failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Configuration the estimates do not cover (equal coordinates in the Green bound).
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

// Requested c11 characteristics of a domain without boundary.
class NoBoundaryError : public Error {
 public:
  using Error::Error;
};

// Exhaustive search would be too large (D_gamma permutations for d > 6).
class CombinatorialLimitError : public Error {
 public:
  using Error::Error;
};

// Monte Carlo data outside the regime an estimator assumes (non-exponential decay).
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration could not be parsed or is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aniso
