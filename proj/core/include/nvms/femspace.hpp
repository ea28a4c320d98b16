// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nvms/mesh.hpp"

namespace nvms {

/// Nodal Lagrange basis of order P on one reference element. Triangles use
/// P_P, quads the tensor space Q_P.
class LagrangeBasis {
 public:
  LagrangeBasis(ElementKind kind, int order);

  ElementKind kind() const { return kind_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Reference nodes: vertices, then edge nodes (each edge from its first to
  /// its second vertex), then interior nodes.
  std::span<const Point> nodes() const { return nodes_; }

  /// Values, reference gradients (n x 2) and reference Hessians (n x 3, as
  /// xx, xy, yy) at a reference point.
  void evaluate(const Point& ref, Eigen::VectorXd& values, Eigen::MatrixX2d& grads,
                Eigen::MatrixX3d* hessians = nullptr) const;

  /// Local node indices lying on a facet, in facet-parameter order.
  std::vector<int> facet_nodes(int local_facet) const;

  /// Monomial exponents (x^i y^j) and coefficient matrix; column k holds the
  /// monomial coefficients of basis function k.
  std::span<const std::array<int, 2>> exponents() const { return exponents_; }
  const Eigen::MatrixXd& monomial_coefficients() const { return coeffs_; }

  /// Shared, lazily built instance.
  static const LagrangeBasis& get(ElementKind kind, int order);

 private:
  ElementKind kind_;
  int order_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd coeffs_;  // column i: monomial coefficients of basis i
};

struct BasisEval {
  Eigen::VectorXd values;
  /// Physical gradients, one row per basis function.
  Eigen::MatrixX2d gradients;
  /// Physical Laplacians.
  Eigen::VectorXd laplacians;
  Point x = Point::Zero();
  /// |det J| (interval: element length).
  double det_j = 0.0;
};

/// Continuous nodal Lagrange space. Global numbering: mesh vertices first
/// (dof = node index), then edge dofs in order of first appearance, then
/// element-interior dofs.
class FESpace {
 public:
  FESpace(std::shared_ptr<const Mesh> mesh, int order);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int order() const { return order_; }
  int n_dofs() const { return n_dofs_; }

  const LagrangeBasis& basis(int element) const;
  std::span<const int> element_dofs(int element) const;
  /// Physical location of each global dof.
  std::span<const Point> dof_points() const { return dof_points_; }

  /// Global dofs on a boundary facet, ordered as LagrangeBasis::facet_nodes.
  std::vector<int> facet_dofs(int element, int local_facet) const;

  /// Nodal interpolant of a scalar field.
  Eigen::VectorXd interpolate(const ScalarFn& f) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int order_;
  int n_dofs_ = 0;
  std::vector<int> offsets_;
  std::vector<int> dofs_;
  std::vector<Point> dof_points_;
};

FESpace make_space(const Mesh& mesh, int order);
FESpace make_space(std::shared_ptr<const Mesh> mesh, int order);

/// Basis values and physical derivatives at a reference point of `element`.
BasisEval eval_basis(const FESpace& space, int element, const Point& ref);

/// Finite-element field value and gradient at a reference point.
struct FieldSample {
  double value = 0.0;
  Point gradient = Point::Zero();
};
FieldSample eval_field(const FESpace& space, const Eigen::VectorXd& coeffs, int element,
                       const Point& ref);

/// Locates the element containing a physical point and its reference
/// coordinates. Throws std::out_of_range when the point is outside the mesh.
std::pair<int, Point> locate(const Mesh& mesh, const Point& x);

/// FE values (and gradients) at physical points.
std::vector<FieldSample> evaluate_solution(const FESpace& space, const Eigen::VectorXd& coeffs,
                                           std::span<const Point> points);

}  // namespace nvms
