#pragma once

#include <cmath>

#include <doctest.h>

#include "speclab/errors.hpp"

namespace check {

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// Runs f and returns the error code it throws; fails the test when nothing is thrown.
template <class F>
speclab::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const speclab::Error& e) {
    return e.code();
  }
  FAIL("expected a speclab::Error");
  return speclab::ErrorCode::InvalidArgument;
}

}  // namespace check
