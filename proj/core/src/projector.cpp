// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/projector.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "nvms/errors.hpp"
#include "nvms/solver.hpp"

namespace nvms {

namespace {

using Triplet = Eigen::Triplet<double>;

bool is_dirichlet(const PhysicalModel& model, const std::string& tag) {
  const auto it = model.bcs.find(tag);
  if (it == model.bcs.end()) throw ConfigError("no boundary condition for tag '" + tag + "'");
  return it->second.kind == BcKind::dirichlet;
}

void check_beta(const FESpace& space, const std::vector<double>& beta) {
  if (static_cast<int>(beta.size()) != space.mesh().n_elements())
    throw std::invalid_argument("projection: need one beta per element");
}

void scatter(std::vector<Triplet>& t, std::span<const int> dofs, const Eigen::MatrixXd& local) {
  for (std::size_t i = 0; i < dofs.size(); ++i)
    for (std::size_t j = 0; j < dofs.size(); ++j)
      if (local(i, j) != 0.0) t.emplace_back(dofs[i], dofs[j], local(i, j));
}

void scatter(Eigen::VectorXd& v, std::span<const int> dofs, const Eigen::VectorXd& local) {
  for (std::size_t i = 0; i < dofs.size(); ++i) v[dofs[i]] += local[i];
}

double local_value(const BasisEval& b, const Eigen::VectorXd& c, std::span<const int> dofs) {
  double v = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i) v += c[dofs[i]] * b.values[i];
  return v;
}

Point local_gradient(const BasisEval& b, const Eigen::VectorXd& c, std::span<const int> dofs) {
  Point g = Point::Zero();
  for (std::size_t i = 0; i < dofs.size(); ++i) g += c[dofs[i]] * b.gradients.row(i).transpose();
  return g;
}

/// Calls fn(basis, weight) for each facet quadrature point of boundary facet i.
template <class Fn>
void for_facet_rule(const FESpace& space, const BoundaryFacet& bf, int degree, Fn fn) {
  const Mesh& mesh = space.mesh();
  const ElementKind kind = mesh.element(bf.element).kind;
  const QuadratureRule rule = facet_quadrature(mesh, degree);
  const double measure = mesh.facet_measure(bf.element, bf.local_facet);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point ref = facet_reference_point(kind, bf.local_facet, rule.points[q].x());
    fn(eval_basis(space, bf.element, ref), rule.weights[q] * measure);
  }
}

/// Error e = phi - phi_h and its gradient at a reference sample.
struct ErrorAt {
  BasisEval basis;
  double e;
  Point grad;
};

ErrorAt error_at(const FESpace& space, int element, const ReferenceSample& s,
                 const Eigen::VectorXd& coeffs) {
  ErrorAt out{eval_basis(space, element, s.ref), 0.0, Point::Zero()};
  const auto dofs = space.element_dofs(element);
  out.e = s.value - local_value(out.basis, coeffs, dofs);
  out.grad = s.gradient - local_gradient(out.basis, coeffs, dofs);
  return out;
}

}  // namespace

FieldSample ProjectionResult::fine_scale(const Point& x) const {
  if (!space || !reference) throw std::logic_error("ProjectionResult: no field attached");
  const FieldSample ref = reference->value_at(x);
  const auto [e, r] = locate(space->mesh(), x);
  const FieldSample h = eval_field(*space, coefficients, e, r);
  return {ref.value - h.value, ref.gradient - h.gradient};
}

ProjectionSystem nitsche_system(const FESpace& space, const std::vector<double>& beta,
                                const ReferenceField& reference, const PhysicalModel& model) {
  check_beta(space, beta);
  const Mesh& mesh = space.mesh();
  const int n = space.n_dofs();
  const int deg = 2 * space.order();
  std::vector<Triplet> t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    const int m = static_cast<int>(dofs.size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    const QuadratureRule rule = quadrature(mesh.element(e).kind, deg);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = eval_basis(space, e, rule.points[q]);
      local.noalias() +=
          rule.weights[q] * b.det_j * model.kappa(b.x) * b.gradients * b.gradients.transpose();
    }
    scatter(t, dofs, local);
    Eigen::VectorXd lr = Eigen::VectorXd::Zero(m);
    for (const ReferenceSample& s : reference.volume_samples(mesh, e)) {
      const BasisEval b = eval_basis(space, e, s.ref);
      lr += s.weight * model.kappa(s.x) * (b.gradients * s.gradient);
    }
    scatter(rhs, dofs, lr);
  }

  const auto facets = mesh.boundary_facets();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const BoundaryFacet& bf = facets[i];
    const bool dirichlet = is_dirichlet(model, bf.tag);
    const double b_e = beta[bf.element];
    if (dirichlet && !(b_e > 0.0)) throw ConfigError("missing penalty on a Dirichlet facet");
    const Point nrm = mesh.facet_normal(bf.element, bf.local_facet);
    const auto dofs = space.element_dofs(bf.element);
    const int m = static_cast<int>(dofs.size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    for_facet_rule(space, bf, deg, [&](const BasisEval& b, double w) {
      const double kappa = model.kappa(b.x);
      const double a_n = model.a(b.x).dot(nrm);
      const Eigen::VectorXd dn = b.gradients * nrm;
      const Eigen::VectorXd& N = b.values;
      if (dirichlet) {
        local.noalias() -= w * kappa * (N * dn.transpose() + dn * N.transpose());
        local.noalias() += w * kappa * b_e * N * N.transpose();
      }
      if (a_n >= 0.0) local.noalias() += w * a_n * N * N.transpose();
    });
    scatter(t, dofs, local);
    Eigen::VectorXd lr = Eigen::VectorXd::Zero(m);
    for (const ReferenceSample& s : reference.facet_samples(mesh, static_cast<int>(i))) {
      const BasisEval b = eval_basis(space, bf.element, s.ref);
      const double kappa = model.kappa(s.x);
      const double a_n = model.a(s.x).dot(nrm);
      const Eigen::VectorXd dn = b.gradients * nrm;
      if (dirichlet)
        lr += s.weight * kappa *
              ((b_e * s.value - s.gradient.dot(nrm)) * b.values - s.value * dn);
      if (a_n >= 0.0) lr += s.weight * a_n * s.value * b.values;
    }
    scatter(rhs, dofs, lr);
  }

  ProjectionSystem sys;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  return sys;
}

ProjectionResult nitsche_project(const FESpace& space, const std::vector<double>& beta,
                                 const ReferenceField& reference, const PhysicalModel& model,
                                 const ProjectionOptions& options) {
  const ProjectionSystem sys = nitsche_system(space, beta, reference, model);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(sys.matrix);
  const bool definite = ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
  if (!definite && !options.allow_indefinite)
    throw SolverError(
        "projection system is not positive definite; beta is probably below the 4 T1 "
        "coercivity threshold");
  SolveReport report;
  ProjectionResult out;
  out.definite = definite;
  out.coefficients = solve(sys.matrix, sys.rhs, &report);
  out.condition_estimate = report.condition_estimate;
  out.space = std::make_shared<FESpace>(space);
  out.reference = reference.clone();
  return out;
}

double nitsche_objective(const FESpace& space, const std::vector<double>& beta,
                         const ReferenceField& reference, const PhysicalModel& model,
                         const Eigen::VectorXd& coeffs) {
  check_beta(space, beta);
  const Mesh& mesh = space.mesh();
  double J = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (const ReferenceSample& s : reference.volume_samples(mesh, e)) {
      const ErrorAt err = error_at(space, e, s, coeffs);
      J += 0.5 * s.weight * model.kappa(s.x) * err.grad.squaredNorm();
    }
  const auto facets = mesh.boundary_facets();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const BoundaryFacet& bf = facets[i];
    const bool dirichlet = is_dirichlet(model, bf.tag);
    const Point nrm = mesh.facet_normal(bf.element, bf.local_facet);
    for (const ReferenceSample& s : reference.facet_samples(mesh, static_cast<int>(i))) {
      const ErrorAt err = error_at(space, bf.element, s, coeffs);
      const double kappa = model.kappa(s.x);
      const double a_n = model.a(s.x).dot(nrm);
      if (dirichlet)
        J += s.weight * kappa *
             (-err.grad.dot(nrm) * err.e + 0.5 * beta[bf.element] * err.e * err.e);
      if (a_n >= 0.0) J += 0.5 * s.weight * a_n * err.e * err.e;
    }
  }
  return J;
}

Eigen::VectorXd nitsche_residual(const FESpace& space, const std::vector<double>& beta,
                                 const ReferenceField& reference, const PhysicalModel& model,
                                 const Eigen::VectorXd& coeffs) {
  check_beta(space, beta);
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(space.n_dofs());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    Eigen::VectorXd lr = Eigen::VectorXd::Zero(dofs.size());
    for (const ReferenceSample& s : reference.volume_samples(mesh, e)) {
      const ErrorAt err = error_at(space, e, s, coeffs);
      lr -= s.weight * model.kappa(s.x) * (err.basis.gradients * err.grad);
    }
    scatter(r, dofs, lr);
  }
  const auto facets = mesh.boundary_facets();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const BoundaryFacet& bf = facets[i];
    const bool dirichlet = is_dirichlet(model, bf.tag);
    const Point nrm = mesh.facet_normal(bf.element, bf.local_facet);
    const auto dofs = space.element_dofs(bf.element);
    Eigen::VectorXd lr = Eigen::VectorXd::Zero(dofs.size());
    for (const ReferenceSample& s : reference.facet_samples(mesh, static_cast<int>(i))) {
      const ErrorAt err = error_at(space, bf.element, s, coeffs);
      const double kappa = model.kappa(s.x);
      const double a_n = model.a(s.x).dot(nrm);
      const Eigen::VectorXd& N = err.basis.values;
      if (dirichlet) {
        const Eigen::VectorXd dn = err.basis.gradients * nrm;
        lr += s.weight * kappa *
              (err.grad.dot(nrm) * N + err.e * dn - beta[bf.element] * err.e * N);
      }
      if (a_n >= 0.0) lr -= s.weight * a_n * err.e * N;
    }
    scatter(r, dofs, lr);
  }
  return r;
}

ProjectionResult h10_project(const FESpace& space, const ReferenceField& reference) {
  const Mesh& mesh = space.mesh();
  const int n = space.n_dofs();
  const int P = space.order();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  ProjectionResult out;

  if (mesh.dimension() == 1) {
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto dofs = space.element_dofs(e);
      for (int v = 0; v < 2; ++v) c[dofs[v]] = reference.value_at(space.dof_points()[dofs[v]]).value;
      if (P < 2) continue;
      // Moments against s^p, s = (x - x_left) / h, for the interior dofs.
      const int m = P - 1;
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, P + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
      for (const ReferenceSample& s : reference.volume_samples(mesh, e)) {
        const BasisEval b = eval_basis(space, e, s.ref);
        for (int p = 0; p < m; ++p) {
          const double sp = std::pow(s.ref.x(), p);
          M.row(p) += s.weight * sp * b.values.transpose();
          rhs[p] += s.weight * sp * s.value;
        }
      }
      const Eigen::VectorXd known(Eigen::Vector2d(c[dofs[0]], c[dofs[1]]));
      rhs -= M.leftCols(2) * known;
      const Eigen::VectorXd interior = M.rightCols(m).fullPivLu().solve(rhs);
      for (int k = 0; k < m; ++k) c[dofs[2 + k]] = interior[k];
    }
    out.coefficients = std::move(c);
  } else {
    std::vector<char> fixed(n, 0);
    for (const BoundaryFacet& bf : mesh.boundary_facets())
      for (int d : space.facet_dofs(bf.element, bf.local_facet)) fixed[d] = 1;
    for (int d = 0; d < n; ++d)
      if (fixed[d]) c[d] = reference.value_at(space.dof_points()[d]).value;
    std::vector<int> free_index(n, -1);
    int n_free = 0;
    for (int d = 0; d < n; ++d)
      if (!fixed[d]) free_index[d] = n_free++;
    std::vector<Triplet> t;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    const int deg = 2 * P;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto dofs = space.element_dofs(e);
      const int m = static_cast<int>(dofs.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
      const QuadratureRule rule = quadrature(mesh.element(e).kind, deg);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisEval b = eval_basis(space, e, rule.points[q]);
        K.noalias() += rule.weights[q] * b.det_j * b.gradients * b.gradients.transpose();
      }
      Eigen::VectorXd lr = Eigen::VectorXd::Zero(m);
      for (const ReferenceSample& s : reference.volume_samples(mesh, e)) {
        const BasisEval b = eval_basis(space, e, s.ref);
        lr += s.weight * (b.gradients * s.gradient);
      }
      for (int i = 0; i < m; ++i) {
        const int fi = free_index[dofs[i]];
        if (fi < 0) continue;
        rhs[fi] += lr[i];
        for (int j = 0; j < m; ++j) {
          const int fj = free_index[dofs[j]];
          if (fj >= 0)
            t.emplace_back(fi, fj, K(i, j));
          else
            rhs[fi] -= K(i, j) * c[dofs[j]];
        }
      }
    }
    if (n_free > 0) {
      SparseMatrix A(n_free, n_free);
      A.setFromTriplets(t.begin(), t.end());
      SolveReport report;
      const Eigen::VectorXd x = solve(A, rhs, &report);
      out.condition_estimate = report.condition_estimate;
      for (int d = 0; d < n; ++d)
        if (free_index[d] >= 0) c[d] = x[free_index[d]];
    }
    out.coefficients = std::move(c);
  }
  out.space = std::make_shared<FESpace>(space);
  out.reference = reference.clone();
  return out;
}

std::vector<FluxSample> recover_flux(const FESpace& space, const Eigen::VectorXd& coeffs,
                                     int facet, double beta, const PhysicalModel& model) {
  const Mesh& mesh = space.mesh();
  const BoundaryFacet& bf = mesh.boundary_facets()[facet];
  const auto it = model.bcs.find(bf.tag);
  if (it == model.bcs.end() || it->second.kind != BcKind::dirichlet)
    throw ConfigError("flux recovery needs a Dirichlet facet (tag '" + bf.tag + "')");
  const ScalarFn& phi_d = it->second.value;
  const Point nrm = mesh.facet_normal(bf.element, bf.local_facet);
  const auto dofs = space.element_dofs(bf.element);
  std::vector<FluxSample> out;
  for_facet_rule(space, bf, 2 * space.order(), [&](const BasisEval& b, double w) {
    const double kappa = model.kappa(b.x);
    const double a_n = model.a(b.x).dot(nrm);
    const double jump = local_value(b, coeffs, dofs) - phi_d(b.x);
    FluxSample s;
    s.x = b.x;
    s.weight = w;
    s.naive = -kappa * local_gradient(b, coeffs, dofs).dot(nrm);
    s.flux = s.naive + kappa * beta * jump;
    if (a_n >= 0.0) s.flux += a_n * jump;
    out.push_back(s);
  });
  return out;
}

double max_generalized_eigenvalue(const Eigen::MatrixXd& B, const Eigen::MatrixXd& A,
                                  double threshold) {
  const double max_diag = A.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) throw SolverError("generalized eigenproblem: zero right-hand Gram");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw SolverError("generalized eigenproblem: no convergence");
  const double cut = threshold * max_diag;
  std::vector<int> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()[k] > cut) keep.push_back(static_cast<int>(k));
  if (keep.empty()) throw SolverError("generalized eigenproblem: zero right-hand Gram");
  Eigen::MatrixXd Z(A.rows(), keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k)
    Z.col(k) = es.eigenvectors().col(keep[k]) / std::sqrt(es.eigenvalues()[keep[k]]);
  const Eigen::MatrixXd C = Z.transpose() * B * Z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(0.5 * (C + C.transpose()),
                                                    Eigen::EigenvaluesOnly);
  if (ec.info() != Eigen::Success) throw SolverError("generalized eigenproblem: no convergence");
  return ec.eigenvalues().maxCoeff();
}

InverseConstants inverse_constants(const FESpace& space, const PhysicalModel& model,
                                   const std::vector<double>* weights) {
  const Mesh& mesh = space.mesh();
  const int n = space.n_dofs();
  const int deg = 2 * space.order();
  if (weights && static_cast<int>(weights->size()) != mesh.n_elements())
    throw std::invalid_argument("inverse_constants: need one weight per element");
  auto weight = [&](int e) { return weights ? (*weights)[e] : 1.0; };
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n), W = S, Bd = S, Bw = S;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    const QuadratureRule rule = quadrature(mesh.element(e).kind, deg);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = eval_basis(space, e, rule.points[q]);
      const double w = rule.weights[q] * b.det_j;
      const Eigen::VectorXd adv = b.gradients * model.a(b.x);
      for (std::size_t i = 0; i < dofs.size(); ++i)
        for (std::size_t j = 0; j < dofs.size(); ++j) {
          S(dofs[i], dofs[j]) += w * b.gradients.row(i).dot(b.gradients.row(j));
          W(dofs[i], dofs[j]) += w * weight(e) * adv[i] * adv[j];
        }
    }
  }
  bool any_dirichlet = false;
  for (const BoundaryFacet& bf : mesh.boundary_facets()) {
    if (!is_dirichlet(model, bf.tag)) continue;
    any_dirichlet = true;
    const Point nrm = mesh.facet_normal(bf.element, bf.local_facet);
    const auto dofs = space.element_dofs(bf.element);
    for_facet_rule(space, bf, deg, [&](const BasisEval& b, double w) {
      const Point a = model.a(b.x);
      const bool outflow = a.dot(nrm) >= 0.0;
      const Eigen::VectorXd dn = b.gradients * nrm;
      const Eigen::VectorXd adv = b.gradients * a;
      for (std::size_t i = 0; i < dofs.size(); ++i)
        for (std::size_t j = 0; j < dofs.size(); ++j) {
          Bd(dofs[i], dofs[j]) += w * dn[i] * dn[j];
          if (outflow) Bw(dofs[i], dofs[j]) += w * weight(bf.element) * adv[i] * adv[j];
        }
    });
  }
  if (!any_dirichlet) throw ConfigError("inverse_constants: no Dirichlet facet");
  InverseConstants out;
  out.T1 = max_generalized_eigenvalue(Bd, S);
  if (W.diagonal().maxCoeff() > 0.0 && Bw.diagonal().maxCoeff() > 0.0)
    out.T2 = max_generalized_eigenvalue(Bw, W);
  return out;
}

}  // namespace nvms
