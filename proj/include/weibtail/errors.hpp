#pragma once

#include <stdexcept>
#include <string>

namespace weibtail {

// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sample contains a value <= 0; the log transform is undefined.
class NonPositiveValue : public Error {
 public:
  using Error::Error;
};

// Sample too small (n < 3).
class TooSmall : public Error {
 public:
  using Error::Error;
};

// Number of upper spacings outside [2, n-1].
class KOutOfRange : public Error {
 public:
  using Error::Error;
};

// Zero design variance in the least-squares fit.
class DegenerateDesign : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bias function is identically zero; no Remark-1 sequence exists.
class ZeroBias : public Error {
 public:
  using Error::Error;
};

// Selection grid contains no admissible k.
class EmptyGrid : public Error {
 public:
  using Error::Error;
};

// Return-level query implies a tail probability outside (0, 1).
class InvalidHorizon : public Error {
 public:
  using Error::Error;
};

// Filesystem or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace weibtail
