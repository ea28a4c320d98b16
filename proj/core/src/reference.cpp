// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <Eigen/LU>

#include "nvms/errors.hpp"
#include "nvms/projector.hpp"

namespace nvms {

namespace {

struct SubCell {
  ElementKind kind;
  std::array<Point, 4> v;
};

std::vector<SubCell> subcells(ElementKind kind, int m) {
  std::vector<SubCell> out;
  auto p = [m](int i, int j) { return Point(double(i) / m, double(j) / m); };
  switch (kind) {
    case ElementKind::interval:
      for (int i = 0; i < m; ++i) out.push_back({kind, {p(i, 0), p(i + 1, 0)}});
      break;
    case ElementKind::triangle:
      for (int j = 0; j < m; ++j)
        for (int i = 0; i + j < m; ++i) {
          out.push_back({kind, {p(i, j), p(i + 1, j), p(i, j + 1)}});
          if (i + j < m - 1) out.push_back({kind, {p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)}});
        }
      break;
    case ElementKind::quad:
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          out.push_back({kind, {p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)}});
      break;
  }
  return out;
}

/// Image of a sub-cell reference point in the enclosing reference element.
Point sub_map(const SubCell& c, const Point& r) {
  switch (c.kind) {
    case ElementKind::interval:
      return c.v[0] + r.x() * (c.v[1] - c.v[0]);
    case ElementKind::triangle:
      return c.v[0] + r.x() * (c.v[1] - c.v[0]) + r.y() * (c.v[2] - c.v[0]);
    case ElementKind::quad:
      return (1 - r.x()) * (1 - r.y()) * c.v[0] + r.x() * (1 - r.y()) * c.v[1] +
             r.x() * r.y() * c.v[2] + (1 - r.x()) * r.y() * c.v[3];
  }
  return r;
}

double physical_det(const Mesh& mesh, int e, const Point& ref) {
  return std::abs(mesh.jacobian(e, ref).determinant());
}

}  // namespace

AnalyticReference::AnalyticReference(ScalarFn value, VectorFn gradient, int degree,
                                     int subdivisions)
    : value_(std::move(value)),
      gradient_(std::move(gradient)),
      degree_(degree),
      subdivisions_(subdivisions) {
  if (!value_ || !gradient_) throw std::invalid_argument("AnalyticReference: missing function");
  if (degree_ < 0 || subdivisions_ < 1)
    throw std::invalid_argument("AnalyticReference: bad quadrature settings");
}

std::vector<ReferenceSample> AnalyticReference::volume_samples(const Mesh& coarse,
                                                               int element) const {
  const ElementKind kind = coarse.element(element).kind;
  const QuadratureRule rule = quadrature(kind, degree_);
  const double sub_measure =
      reference_measure(kind) / std::pow(subdivisions_, kind == ElementKind::interval ? 1 : 2);
  std::vector<ReferenceSample> out;
  for (const SubCell& c : subcells(kind, subdivisions_)) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      ReferenceSample s;
      s.ref = sub_map(c, rule.points[q]);
      s.x = coarse.map_to_physical(element, s.ref);
      s.weight = rule.weights[q] / reference_measure(kind) * sub_measure *
                 physical_det(coarse, element, s.ref);
      s.value = value_(s.x);
      s.gradient = gradient_(s.x);
      out.push_back(s);
    }
  }
  return out;
}

std::vector<ReferenceSample> AnalyticReference::facet_samples(const Mesh& coarse,
                                                              int facet) const {
  const BoundaryFacet& bf = coarse.boundary_facets()[facet];
  const ElementKind kind = coarse.element(bf.element).kind;
  std::vector<ReferenceSample> out;
  auto add = [&](double s_param, double w) {
    ReferenceSample s;
    s.ref = facet_reference_point(kind, bf.local_facet, s_param);
    s.x = coarse.map_to_physical(bf.element, s.ref);
    s.weight = w;
    s.value = value_(s.x);
    s.gradient = gradient_(s.x);
    out.push_back(s);
  };
  if (kind == ElementKind::interval) {
    add(0.0, 1.0);
    return out;
  }
  const QuadratureRule g = gauss_legendre(degree_ / 2 + 1);
  const double measure = coarse.facet_measure(bf.element, bf.local_facet);
  for (int k = 0; k < subdivisions_; ++k)
    for (std::size_t q = 0; q < g.size(); ++q)
      add((k + g.points[q].x()) / subdivisions_, g.weights[q] / subdivisions_ * measure);
  return out;
}

FieldSample AnalyticReference::value_at(const Point& x) const {
  return {value_(x), gradient_(x)};
}

std::shared_ptr<const ReferenceField> AnalyticReference::clone() const {
  return std::make_shared<AnalyticReference>(*this);
}

OverrefinedReference::OverrefinedReference(const Mesh& coarse,
                                           std::shared_ptr<const RefinedMesh> refined,
                                           std::shared_ptr<const FESpace> fine_space,
                                           Eigen::VectorXd coefficients, int degree)
    : refined_(std::move(refined)),
      space_(std::move(fine_space)),
      coeffs_(std::move(coefficients)),
      degree_(degree) {
  if (!refined_ || !space_) throw std::invalid_argument("OverrefinedReference: null input");
  if (&space_->mesh() != &refined_->mesh &&
      space_->mesh().n_elements() != refined_->mesh.n_elements())
    throw ConfigError("reference space does not live on the refined mesh");
  if (coeffs_.size() != space_->n_dofs())
    throw ConfigError("reference coefficients do not match the reference space");
  const double fine_h = max_element_size(refined_->mesh);
  const double coarse_h = min_element_size(coarse);
  if (fine_h > coarse_h / 8.0 * (1.0 + 1e-12))
    throw ConfigError("reference mesh is not fine enough (max h must be <= 1/8 of coarse min h)");
  children_.resize(coarse.n_elements());
  for (std::size_t c = 0; c < refined_->parent.size(); ++c)
    children_.at(refined_->parent[c]).push_back(static_cast<int>(c));
  facet_children_.resize(coarse.boundary_facets().size());
  for (std::size_t f = 0; f < refined_->facet_parent.size(); ++f)
    facet_children_.at(refined_->facet_parent[f]).push_back(static_cast<int>(f));
}

std::vector<ReferenceSample> OverrefinedReference::volume_samples(const Mesh& coarse,
                                                                  int element) const {
  const Mesh& fine = space_->mesh();
  std::vector<ReferenceSample> out;
  for (int c : children_.at(element)) {
    const ElementKind kind = fine.element(c).kind;
    const QuadratureRule rule = quadrature(kind, degree_);
    const SubCell cell{kind, refined_->parent_ref[c]};
    const auto dofs = space_->element_dofs(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval be = eval_basis(*space_, c, rule.points[q]);
      ReferenceSample s;
      s.ref = sub_map(cell, rule.points[q]);
      s.x = be.x;
      s.weight = rule.weights[q] * be.det_j;
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        s.value += coeffs_[dofs[i]] * be.values[i];
        s.gradient += coeffs_[dofs[i]] * be.gradients.row(i).transpose();
      }
      out.push_back(s);
    }
  }
  (void)coarse;
  return out;
}

std::vector<ReferenceSample> OverrefinedReference::facet_samples(const Mesh& coarse,
                                                                 int facet) const {
  const Mesh& fine = space_->mesh();
  const BoundaryFacet& cbf = coarse.boundary_facets()[facet];
  const ElementKind ckind = coarse.element(cbf.element).kind;
  const QuadratureRule rule = facet_quadrature(fine, degree_);
  std::vector<ReferenceSample> out;
  for (int f : facet_children_.at(facet)) {
    const BoundaryFacet& fbf = fine.boundary_facets()[f];
    const ElementKind kind = fine.element(fbf.element).kind;
    const auto dofs = space_->element_dofs(fbf.element);
    const auto params = refined_->facet_params[f];
    const double measure = fine.facet_measure(fbf.element, fbf.local_facet);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s_fine = rule.points[q].x();
      const BasisEval be =
          eval_basis(*space_, fbf.element, facet_reference_point(kind, fbf.local_facet, s_fine));
      ReferenceSample s;
      s.ref = facet_reference_point(ckind, cbf.local_facet,
                                    params[0] + s_fine * (params[1] - params[0]));
      s.x = be.x;
      s.weight = rule.weights[q] * measure;
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        s.value += coeffs_[dofs[i]] * be.values[i];
        s.gradient += coeffs_[dofs[i]] * be.gradients.row(i).transpose();
      }
      out.push_back(s);
    }
  }
  return out;
}

FieldSample OverrefinedReference::value_at(const Point& x) const {
  const auto [e, ref] = locate(space_->mesh(), x);
  return eval_field(*space_, coeffs_, e, ref);
}

std::shared_ptr<const ReferenceField> OverrefinedReference::clone() const {
  return std::make_shared<OverrefinedReference>(*this);
}

}  // namespace nvms
