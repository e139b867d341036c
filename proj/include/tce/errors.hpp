#pragma once

#include <stdexcept>
#include <string>

namespace tce {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A continued fraction was asked for a partial quotient it does not carry.
class DepthExhausted : public Error {
 public:
  using Error::Error;
};

// A semiconvergent index (m, n) with n > lambda_{m+1}.
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// Closed-form return data requested at or before the threshold index (m0, n0).
class IndexBelowThreshold : public Error {
 public:
  using Error::Error;
};

// Arithmetic between elements of Z + Z*lambda over two different lambdas.
class MixedLambda : public Error {
 public:
  using Error::Error;
};

// A point sits within the guard tolerance of a region boundary and strict
// classification was requested.
class PrecisionAmbiguous : public Error {
 public:
  using Error::Error;
};

class NotInDomain : public Error {
 public:
  using Error::Error;
};

class IterationBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class NotPeriodic : public Error {
 public:
  using Error::Error;
};

// Malformed parameters: angles, permutation, eta range, config content.
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

}  // namespace tce
