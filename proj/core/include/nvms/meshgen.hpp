// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nvms/mesh.hpp"

namespace nvms {

/// Structured nx x ny mesh of [0,1]^2 made of triangles (each cell cut along
/// alternating diagonals) or quads. Interior nodes are displaced by up to
/// `perturbation` times the cell size using a fixed seed. Tags: left, right,
/// bottom, top.
Mesh unit_square_mesh(int nx, int ny, ElementKind kind, double perturbation = 0.0,
                      std::uint64_t seed = 1);

/// Regular polygon approximating a circle, counter-clockwise.
std::vector<Point> circle_polygon(const Point& center, double radius, int n_vertices);

/// Unstructured Delaunay triangulation of [0,1]^2 minus a convex polygonal
/// hole, with target edge length h. Tags: outer, hole. Deterministic for
/// fixed inputs.
Mesh square_with_hole(const std::vector<Point>& hole, double h);

/// Circular hole of radius 0.24 centred in the unit square.
Mesh circular_hole_mesh(double h);
/// Diamond exclusion with vertices (0.25,0.5), (0.5,0.25), (0.75,0.5), (0.5,0.75).
Mesh diamond_hole_mesh(double h);

/// Uniform refinement of every element into factor^d children. Children keep
/// the coordinates of their vertices in the parent's reference element, so
/// fields on the fine mesh can be integrated exactly against coarse bases.
struct RefinedMesh {
  Mesh mesh;
  std::vector<int> parent;
  /// Parent-reference coordinates of each child's vertices.
  std::vector<std::array<Point, 4>> parent_ref;
  /// Per fine boundary facet: index of the coarse boundary facet it lies in
  /// and the coarse facet parameters of its endpoints.
  std::vector<int> facet_parent;
  std::vector<std::array<double, 2>> facet_params;
};

RefinedMesh refine_uniform(const Mesh& coarse, int factor);

/// Ratio of the largest to the smallest element size.
double size_ratio(const Mesh& mesh);
double max_element_size(const Mesh& mesh);
double min_element_size(const Mesh& mesh);

}  // namespace nvms
