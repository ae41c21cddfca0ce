#pragma once

#include <cmath>
#include <numbers>

#include "ritz/ad/dual.hpp"

namespace ritz::core {

// sin(πt), evaluated as sin(π(1-t)) on the upper half so that it is exactly
// zero at both t = 0 and t = 1.
template <class T>
T endpoint_mask(const T& t) {
  using std::sin;
  if (ad::value_of(t) <= 0.5) return sin(std::numbers::pi * t);
  return sin(std::numbers::pi * (1.0 - t));
}

}  // namespace ritz::core
