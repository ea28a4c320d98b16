// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/femspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/LU>

namespace nvms {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

std::vector<std::array<int, 2>> monomials(ElementKind kind, int P) {
  std::vector<std::array<int, 2>> m;
  switch (kind) {
    case ElementKind::interval:
      for (int i = 0; i <= P; ++i) m.push_back({i, 0});
      break;
    case ElementKind::triangle:
      for (int d = 0; d <= P; ++d)
        for (int j = 0; j <= d; ++j) m.push_back({d - j, j});
      break;
    case ElementKind::quad:
      for (int j = 0; j <= P; ++j)
        for (int i = 0; i <= P; ++i) m.push_back({i, j});
      break;
  }
  return m;
}

std::vector<Point> reference_nodes(ElementKind kind, int P) {
  const auto verts = reference_vertices(kind);
  std::vector<Point> nodes(verts.begin(), verts.end());
  if (kind == ElementKind::interval) {
    for (int k = 1; k < P; ++k) nodes.emplace_back(double(k) / P, 0.0);
    return nodes;
  }
  const int nv = vertex_count(kind);
  for (int e = 0; e < nv; ++e) {
    const Point& a = verts[e];
    const Point& b = verts[(e + 1) % nv];
    for (int k = 1; k < P; ++k) nodes.push_back(a + (double(k) / P) * (b - a));
  }
  if (kind == ElementKind::triangle) {
    for (int j = 1; j < P; ++j)
      for (int i = 1; i + j < P; ++i) nodes.emplace_back(double(i) / P, double(j) / P);
  } else {
    for (int j = 1; j < P; ++j)
      for (int i = 1; i < P; ++i) nodes.emplace_back(double(i) / P, double(j) / P);
  }
  return nodes;
}

}  // namespace

LagrangeBasis::LagrangeBasis(ElementKind kind, int order) : kind_(kind), order_(order) {
  if (order < 1 || order > 3) throw std::invalid_argument("unsupported polynomial order");
  nodes_ = reference_nodes(kind, order);
  exponents_ = monomials(kind, order);
  const int n = size();
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      V(i, k) = ipow(nodes_[i].x(), exponents_[k][0]) * ipow(nodes_[i].y(), exponents_[k][1]);
  // Row i of V times column j of coeffs = delta_ij.
  coeffs_ = V.fullPivLu().inverse();
}

const LagrangeBasis& LagrangeBasis::get(ElementKind kind, int order) {
  static const std::vector<LagrangeBasis> table = [] {
    std::vector<LagrangeBasis> t;
    for (ElementKind k : {ElementKind::interval, ElementKind::triangle, ElementKind::quad})
      for (int p = 1; p <= 3; ++p) t.emplace_back(k, p);
    return t;
  }();
  if (order < 1 || order > 3) throw std::invalid_argument("unsupported polynomial order");
  return table[static_cast<int>(kind) * 3 + (order - 1)];
}

void LagrangeBasis::evaluate(const Point& ref, Eigen::VectorXd& values, Eigen::MatrixX2d& grads,
                             Eigen::MatrixX3d* hessians) const {
  const int n = size();
  const double x = ref.x(), y = ref.y();
  Eigen::VectorXd m(n), mx(n), my(n), mxx(n), mxy(n), myy(n);
  for (int k = 0; k < n; ++k) {
    const int i = exponents_[k][0], j = exponents_[k][1];
    const double xi = ipow(x, i), yj = ipow(y, j);
    const double dxi = i > 0 ? i * ipow(x, i - 1) : 0.0;
    const double dyj = j > 0 ? j * ipow(y, j - 1) : 0.0;
    const double ddxi = i > 1 ? i * (i - 1) * ipow(x, i - 2) : 0.0;
    const double ddyj = j > 1 ? j * (j - 1) * ipow(y, j - 2) : 0.0;
    m[k] = xi * yj;
    mx[k] = dxi * yj;
    my[k] = xi * dyj;
    mxx[k] = ddxi * yj;
    mxy[k] = dxi * dyj;
    myy[k] = xi * ddyj;
  }
  values = coeffs_.transpose() * m;
  grads.resize(n, 2);
  grads.col(0) = coeffs_.transpose() * mx;
  grads.col(1) = coeffs_.transpose() * my;
  if (hessians) {
    hessians->resize(n, 3);
    hessians->col(0) = coeffs_.transpose() * mxx;
    hessians->col(1) = coeffs_.transpose() * mxy;
    hessians->col(2) = coeffs_.transpose() * myy;
  }
}

std::vector<int> LagrangeBasis::facet_nodes(int local_facet) const {
  if (kind_ == ElementKind::interval) return {local_facet};
  const int nv = vertex_count(kind_);
  std::vector<int> out{local_facet};
  for (int k = 0; k < order_ - 1; ++k) out.push_back(nv + local_facet * (order_ - 1) + k);
  out.push_back((local_facet + 1) % nv);
  return out;
}

FESpace::FESpace(std::shared_ptr<const Mesh> mesh, int order)
    : mesh_(std::move(mesh)), order_(order) {
  if (order < 1 || order > 3)
    throw std::invalid_argument("FESpace: order must be 1, 2 or 3");
  const Mesh& m = *mesh_;
  const int P = order;
  int next = m.n_nodes();
  std::map<std::pair<int, int>, int> edge_base;
  offsets_.assign(1, 0);
  dof_points_.assign(m.nodes().begin(), m.nodes().end());
  std::vector<std::pair<int, Point>> interior;

  for (int e = 0; e < m.n_elements(); ++e) {
    const Element& el = m.element(e);
    const LagrangeBasis& b = LagrangeBasis::get(el.kind, P);
    const int nv = el.n_vertices();
    std::vector<int> local(b.size(), -1);
    for (int i = 0; i < nv; ++i) local[i] = el.nodes[i];
    int cursor = nv;
    if (el.kind != ElementKind::interval) {
      for (int f = 0; f < nv; ++f) {
        const int g0 = el.nodes[f], g1 = el.nodes[(f + 1) % nv];
        const std::pair<int, int> key{std::min(g0, g1), std::max(g0, g1)};
        auto [it, inserted] = edge_base.try_emplace(key, next);
        if (inserted) {
          for (int k = 0; k < P - 1; ++k) {
            const double s = double(k + 1) / P;
            dof_points_.push_back((1 - s) * m.node(key.first) + s * m.node(key.second));
          }
          next += P - 1;
        }
        for (int k = 0; k < P - 1; ++k)
          local[cursor + k] = g0 < g1 ? it->second + k : it->second + (P - 2 - k);
        cursor += P - 1;
      }
    }
    for (; cursor < b.size(); ++cursor) {
      local[cursor] = -2 - static_cast<int>(interior.size());
      interior.emplace_back(e, b.nodes()[cursor]);
    }
    dofs_.insert(dofs_.end(), local.begin(), local.end());
    offsets_.push_back(static_cast<int>(dofs_.size()));
  }
  // Interior dofs follow all vertex and edge dofs.
  const int interior_base = next;
  for (int& d : dofs_)
    if (d <= -2) d = interior_base + (-2 - d);
  for (const auto& [e, ref] : interior) dof_points_.push_back(m.map_to_physical(e, ref));
  n_dofs_ = interior_base + static_cast<int>(interior.size());
}

const LagrangeBasis& FESpace::basis(int element) const {
  return LagrangeBasis::get(mesh_->element(element).kind, order_);
}

std::span<const int> FESpace::element_dofs(int element) const {
  return std::span<const int>(dofs_).subspan(offsets_[element],
                                             offsets_[element + 1] - offsets_[element]);
}

std::vector<int> FESpace::facet_dofs(int element, int local_facet) const {
  const auto local = basis(element).facet_nodes(local_facet);
  const auto dofs = element_dofs(element);
  std::vector<int> out;
  for (int i : local) out.push_back(dofs[i]);
  return out;
}

Eigen::VectorXd FESpace::interpolate(const ScalarFn& f) const {
  Eigen::VectorXd c(n_dofs_);
  for (int i = 0; i < n_dofs_; ++i) c[i] = f(dof_points_[i]);
  return c;
}

FESpace make_space(const Mesh& mesh, int order) {
  return FESpace(std::make_shared<const Mesh>(mesh), order);
}

FESpace make_space(std::shared_ptr<const Mesh> mesh, int order) {
  return FESpace(std::move(mesh), order);
}

BasisEval eval_basis(const FESpace& space, int element, const Point& ref) {
  const Mesh& mesh = space.mesh();
  const LagrangeBasis& b = space.basis(element);
  BasisEval out;
  Eigen::MatrixX2d ref_grad;
  Eigen::MatrixX3d ref_hess;
  b.evaluate(ref, out.values, ref_grad, &ref_hess);
  const Eigen::Matrix2d J = mesh.jacobian(element, ref);
  const double det = J.determinant();
  if (!(std::abs(det) > 0.0)) throw std::runtime_error("eval_basis: singular Jacobian");
  const Eigen::Matrix2d Jinv = J.inverse();
  out.det_j = std::abs(det);
  out.x = mesh.map_to_physical(element, ref);
  out.gradients = ref_grad * Jinv;
  const int n = b.size();
  out.laplacians.resize(n);
  const auto map_h = mesh.map_hessian(element);
  const bool curved_map = mesh.element(element).kind == ElementKind::quad;
  for (int i = 0; i < n; ++i) {
    Eigen::Matrix2d H;
    H << ref_hess(i, 0), ref_hess(i, 1), ref_hess(i, 1), ref_hess(i, 2);
    if (curved_map)
      for (int k = 0; k < 2; ++k) H -= out.gradients(i, k) * map_h[k];
    out.laplacians[i] = (Jinv.transpose() * H * Jinv).trace();
  }
  if (mesh.dimension() == 1) out.gradients.col(1).setZero();
  return out;
}

FieldSample eval_field(const FESpace& space, const Eigen::VectorXd& coeffs, int element,
                       const Point& ref) {
  const BasisEval be = eval_basis(space, element, ref);
  const auto dofs = space.element_dofs(element);
  FieldSample s;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    s.value += coeffs[dofs[i]] * be.values[i];
    s.gradient += coeffs[dofs[i]] * be.gradients.row(i).transpose();
  }
  return s;
}

namespace {

/// Reference coordinates of x in element e and whether it lies inside.
bool pull_back(const Mesh& mesh, int e, const Point& x, Point& ref) {
  const Element& el = mesh.element(e);
  const double tol = 1e-12;
  if (el.kind == ElementKind::interval) {
    const double x0 = mesh.node(el.nodes[0]).x(), x1 = mesh.node(el.nodes[1]).x();
    ref = Point((x.x() - x0) / (x1 - x0), 0.0);
    return ref.x() >= -tol && ref.x() <= 1 + tol;
  }
  ref = Point(1.0 / 3, 1.0 / 3);
  for (int it = 0; it < 30; ++it) {
    const Point r = mesh.map_to_physical(e, ref) - x;
    const Point step = mesh.jacobian(e, ref).lu().solve(r);
    ref -= step;
    if (step.norm() < 1e-15) break;
    if (el.kind == ElementKind::triangle) break;
  }
  if (el.kind == ElementKind::triangle)
    return ref.x() >= -tol && ref.y() >= -tol && ref.x() + ref.y() <= 1 + tol;
  return ref.x() >= -tol && ref.y() >= -tol && ref.x() <= 1 + tol && ref.y() <= 1 + tol;
}

}  // namespace

std::pair<int, Point> locate(const Mesh& mesh, const Point& x) {
  Point ref;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.element(e);
    // Bounding-box rejection before the pullback.
    Point lo = mesh.node(el.nodes[0]), hi = lo;
    for (int i = 1; i < el.n_vertices(); ++i) {
      lo = lo.cwiseMin(mesh.node(el.nodes[i]));
      hi = hi.cwiseMax(mesh.node(el.nodes[i]));
    }
    const double pad = 1e-12 * std::max(1.0, (hi - lo).norm());
    if (x.x() < lo.x() - pad || x.x() > hi.x() + pad) continue;
    if (mesh.dimension() == 2 && (x.y() < lo.y() - pad || x.y() > hi.y() + pad)) continue;
    if (pull_back(mesh, e, x, ref)) return {e, ref};
  }
  throw std::out_of_range("point outside mesh");
}

std::vector<FieldSample> evaluate_solution(const FESpace& space, const Eigen::VectorXd& coeffs,
                                           std::span<const Point> points) {
  std::vector<FieldSample> out;
  out.reserve(points.size());
  for (const Point& x : points) {
    const auto [e, ref] = locate(space.mesh(), x);
    out.push_back(eval_field(space, coeffs, e, ref));
  }
  return out;
}

}  // namespace nvms
