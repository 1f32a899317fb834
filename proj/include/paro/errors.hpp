#pragma once

#include <stdexcept>
#include <string>

namespace paro {

// Base of all library errors. cli_exit_code() distinguishes bad input (3)
// from numerical failure (4) for the command-line front end.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int cli_exit_code() const noexcept { return 4; }
};

class InputError : public Error {
 public:
  using Error::Error;
  int cli_exit_code() const noexcept override { return 3; }
};

class BadInput : public InputError {
 public:
  using InputError::InputError;
};

class Unsupported : public InputError {
 public:
  using InputError::InputError;
};

class BadCoefficient : public InputError {
 public:
  using InputError::InputError;
};

class Empty : public InputError {
 public:
  using InputError::InputError;
};

class DimZero : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientSpectrum : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateGap : public InputError {
 public:
  using InputError::InputError;
};

class HypothesisViolated : public InputError {
 public:
  using InputError::InputError;
};

class NotSpd : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class NotIsomorphic : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Shifted factorization met a pivot below pivot_tol * ||A - shift*B||_inf.
class NearSingular : public Error {
 public:
  NearSingular(const std::string& msg, double shift, double smallest_pivot)
      : Error(msg), shift(shift), smallest_pivot(smallest_pivot) {}
  double shift;
  double smallest_pivot;
};

}  // namespace paro
