// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "nvms/quadrature.hpp"

namespace nvms {

/// Scalar field over physical coordinates. One-dimensional problems use x only.
using ScalarFn = std::function<double(const Point&)>;
/// Vector field over physical coordinates (second component zero in 1D).
using VectorFn = std::function<Point(const Point&)>;

inline ScalarFn constant_field(double value) {
  return [value](const Point&) { return value; };
}

inline VectorFn constant_vector(double ax, double ay = 0.0) {
  return [ax, ay](const Point&) { return Point(ax, ay); };
}

}  // namespace nvms
