#pragma once

#include <stdexcept>
#include <string>

namespace cojump {

// Every failure raised by the library derives from Error so callers can
// catch the family; the concrete type tells the harness how to account for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model, scheme, or tuning parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Index or time outside the observed range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A ratio statistic whose denominator vanished (flat path, no overlap).
class DegeneratePathError : public Error {
 public:
  using Error::Error;
};

// Spot estimator window contains no complete observation interval.
class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

// Bootstrap offset window has no admissible candidate near a grid boundary.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

// floor(alpha * M) == 0: the requested order statistic does not exist.
class LevelTooSmallError : public Error {
 public:
  using Error::Error;
};

// Rejection sampling exhausted its budget or the event is impossible.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

}  // namespace cojump
