// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace polygauge {

/// Base class for all polygauge errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, non-finite data, bad schema.
class InputError : public Error {
public:
  using Error::Error;
};

/// A builder was asked for more columns than the dense representation allows.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// H-support requested at a point where the gauge vanishes (x = 0 or an
/// invalid gauge direction); every column ties and the support is undefined.
class UndefinedSupportError : public Error {
public:
  using Error::Error;
};

/// A certification precondition does not hold (restricted injectivity,
/// nonzero face vector, positive criterion, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// A matrix that must be inverted is numerically singular at the configured
/// condition limit.
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// An iterative solver stalled or hit its iteration cap.
class SolverFailure : public Error {
public:
  using Error::Error;
};

} // namespace polygauge
