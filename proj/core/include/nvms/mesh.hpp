// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nvms/field.hpp"
#include "nvms/quadrature.hpp"

namespace nvms {

struct Element {
  ElementKind kind = ElementKind::triangle;
  std::array<int, 4> nodes{-1, -1, -1, -1};

  int n_vertices() const;
};

struct BoundaryFacet {
  int element = -1;
  int local_facet = -1;
  std::string tag;
};

int vertex_count(ElementKind kind);
int facet_count(ElementKind kind);
/// Local vertex indices spanning facet `local_facet`; intervals have a single vertex.
std::array<int, 2> facet_vertices(ElementKind kind, int local_facet);
/// Reference coordinates of facet parameter s in [0,1] (ignored for intervals).
Point facet_reference_point(ElementKind kind, int local_facet, double s);
/// Reference coordinates of the element's vertices.
std::span<const Point> reference_vertices(ElementKind kind);

/// Immutable mesh of intervals (dim 1) or triangles/quads (dim 2). The
/// constructor validates connectivity, orientation and boundary coverage.
class Mesh {
 public:
  Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
       std::vector<BoundaryFacet> boundary);

  int dimension() const { return dim_; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_elements() const { return static_cast<int>(elements_.size()); }

  const Point& node(int i) const { return nodes_[i]; }
  std::span<const Point> nodes() const { return nodes_; }
  const Element& element(int e) const { return elements_[e]; }
  std::span<const Element> elements() const { return elements_; }
  std::span<const BoundaryFacet> boundary_facets() const { return boundary_; }

  /// Sorted, de-duplicated boundary tags.
  std::vector<std::string> boundary_tags() const;

  /// Physical image of a reference point (affine for simplices, bilinear for quads).
  Point map_to_physical(int e, const Point& ref) const;
  /// d(physical)/d(reference). In 1D only the (0,0) entry is meaningful and the
  /// (1,1) entry is set to one so the matrix stays invertible.
  Eigen::Matrix2d jacobian(int e, const Point& ref) const;
  /// Second derivatives of the geometry map: [k] = Hessian of physical coordinate k.
  std::array<Eigen::Matrix2d, 2> map_hessian(int e) const;

  /// Outward unit normal of a straight facet.
  Point facet_normal(int e, int local_facet) const;
  /// Length of a 2D facet; 1 for the point facets of 1D meshes.
  double facet_measure(int e, int local_facet) const;
  double element_measure(int e) const;
  /// Longest element edge (element length in 1D).
  double element_size(int e) const;
  Point centroid(int e) const;

 private:
  void validate() const;

  int dim_;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<BoundaryFacet> boundary_;
};

/// Uniform partition of [x_left, x_right]; boundary tags "left" and "right".
Mesh build_interval_mesh(double x_left, double x_right, int n_elements);

/// Reads the line-oriented mesh format (dim / nodes / elements / bfacets).
Mesh load_mesh(const std::string& path);
Mesh parse_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);

struct FacetGeometry {
  double measure = 0.0;
  Point normal = Point::Zero();
  /// Shape coefficient h |F| / |K|.
  double c_s = 0.0;
};

struct ElementGeometry {
  double h = 0.0;
  double measure = 0.0;
  Point centroid = Point::Zero();
  std::vector<FacetGeometry> facets;
};

ElementGeometry element_geometry(const Mesh& mesh, int element);

enum class BcKind { dirichlet, neumann };
enum class Orientation { inflow, outflow };

struct FacetTagging {
  BcKind kind = BcKind::dirichlet;
  /// Facet parameters of the sampled points, with their orientation.
  std::vector<double> params;
  std::vector<Orientation> orientation;
  /// True iff every sampled point is outflow (a.n >= 0).
  bool outflow_facet = false;
};

struct BoundaryTagging {
  int degree = 0;
  /// Parallel to Mesh::boundary_facets().
  std::vector<FacetTagging> facets;
};

/// Labels each facet quadrature point (rule exact to `degree`) inflow or
/// outflow by the sign of a.n; zero counts as outflow. Tags missing from
/// `kinds` raise ConfigError.
BoundaryTagging classify_boundary(const Mesh& mesh, const VectorFn& a,
                                  const std::map<std::string, BcKind>& kinds, int degree);

/// Facet quadrature on the parameter interval [0,1]; a single unit-weight
/// point for the point facets of 1D meshes.
QuadratureRule facet_quadrature(const Mesh& mesh, int degree);

}  // namespace nvms
