// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Core>

namespace nvms {

enum class ElementKind { interval, triangle, quad };

using Point = Eigen::Vector2d;

/// Points live on the reference element: [0,1] for intervals (y unused),
/// the unit right triangle, and the unit square.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0,1].
QuadratureRule gauss_legendre(int n_points);

/// Rule on the reference element of `kind` that integrates every polynomial of
/// total degree <= `degree` exactly (tensor degree for quads).
QuadratureRule quadrature(ElementKind kind, int degree);

/// Measure of the reference element (1, 1/2, 1).
double reference_measure(ElementKind kind);

}  // namespace nvms
