// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include <Eigen/LU>

#include "nvms/errors.hpp"
#include "nvms/params.hpp"

namespace nvms {

std::map<std::string, BcKind> PhysicalModel::bc_kinds() const {
  std::map<std::string, BcKind> out;
  for (const auto& [tag, bc] : bcs) out[tag] = bc.kind;
  return out;
}

const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::galerkin_nitsche: return "galerkin_nitsche";
    case ModelVariant::classical_vms: return "classical_vms";
    case ModelVariant::augmented_vms: return "augmented_vms";
    case ModelVariant::exact_1d: return "exact_1d";
  }
  return "?";
}

ModelVariant parse_variant(const std::string& name) {
  for (ModelVariant v : {ModelVariant::galerkin_nitsche, ModelVariant::classical_vms,
                         ModelVariant::augmented_vms, ModelVariant::exact_1d})
    if (name == variant_name(v)) return v;
  throw ConfigError("unknown model variant '" + name + "'");
}

std::vector<ElementParams> element_parameters(const FESpace& space, const PhysicalModel& model,
                                              ModelVariant variant, const std::vector<double>& beta,
                                              const GreensQuadrature& greens) {
  const Mesh& mesh = space.mesh();
  const int P = space.order();
  if (static_cast<int>(beta.size()) != mesh.n_elements())
    throw std::invalid_argument("element_parameters: need one beta per element");
  if (variant == ModelVariant::exact_1d && mesh.dimension() != 1)
    throw ConfigError("the exact_1d variant requires an interval mesh");

  std::vector<std::vector<int>> boundary_of(mesh.n_elements());
  for (const BoundaryFacet& bf : mesh.boundary_facets())
    boundary_of[bf.element].push_back(bf.local_facet);

  std::vector<ElementParams> out(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    ElementParams& p = out[e];
    const Point a = model.a(g.centroid);
    p.h = g.h;
    p.a_norm = a.norm();
    p.kappa = model.kappa(g.centroid);
    if (!(p.kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    p.beta = beta[e];
    for (const auto& f : g.facets) p.c_s.push_back(f.c_s);
    p.gamma.assign(g.facets.size(), 0.0);
    const TauLimits limits = tau_limits(1, p.a_norm, p.kappa, p.h);
    switch (variant) {
      case ModelVariant::galerkin_nitsche:
        break;
      case ModelVariant::classical_vms:
        p.tau = tau_eff(P, limits);
        break;
      case ModelVariant::augmented_vms:
        p.tau = tau_eff(P, limits);
        for (int f : boundary_of[e]) p.gamma[f] = gamma_eff(P, limits, p.kappa, p.c_s[f]);
        break;
      case ModelVariant::exact_1d:
        p.tau = tau_by_quadrature(P, a.x(), p.kappa, p.h, greens);
        for (int f : boundary_of[e])
          p.gamma[f] = gamma_by_quadrature(P, a.x(), p.kappa, p.h,
                                           f == 0 ? Facet1D::left : Facet1D::right, greens);
        break;
    }
  }
  return out;
}

namespace {

using Triplet = Eigen::Triplet<double>;

struct Contribution {
  std::vector<Triplet> matrix;
  std::vector<std::pair<int, double>> vector;
};

/// Runs fn(item, contribution) over [0, n_items) in contiguous chunks and
/// concatenates the chunks in item order, so the merged sequence is the same
/// for any number of workers.
template <class Fn>
Contribution run_items(int n_items, int threads, Fn fn) {
  threads = std::clamp(threads, 1, std::max(1, n_items));
  std::vector<Contribution> parts(threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](int t) {
    const int begin = static_cast<int>(static_cast<long>(n_items) * t / threads);
    const int end = static_cast<int>(static_cast<long>(n_items) * (t + 1) / threads);
    try {
      for (int i = begin; i < end; ++i) fn(i, parts[t]);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  Contribution all = std::move(parts[0]);
  for (int t = 1; t < threads; ++t) {
    all.matrix.insert(all.matrix.end(), parts[t].matrix.begin(), parts[t].matrix.end());
    all.vector.insert(all.vector.end(), parts[t].vector.begin(), parts[t].vector.end());
  }
  return all;
}

/// Deterministic reduction: stable sort by (col, row), then sum duplicates in
/// generation order.
SparseMatrix to_matrix(int n, std::vector<Triplet> t) {
  std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.col() != b.col() ? a.col() < b.col() : a.row() < b.row();
  });
  std::vector<Triplet> merged;
  merged.reserve(t.size());
  for (const Triplet& x : t) {
    if (!merged.empty() && merged.back().row() == x.row() && merged.back().col() == x.col())
      merged.back() = Triplet(x.row(), x.col(), merged.back().value() + x.value());
    else
      merged.push_back(x);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(merged.begin(), merged.end());
  return A;
}

void add_vector(Eigen::VectorXd& v, const std::vector<std::pair<int, double>>& entries) {
  for (const auto& [i, x] : entries) v[i] += x;
}

void push_local(Contribution& c, std::span<const int> rows, std::span<const int> cols,
                const Eigen::MatrixXd& local) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (local(i, j) != 0.0) c.matrix.emplace_back(rows[i], cols[j], local(i, j));
}

void push_local(Contribution& c, std::span<const int> rows, const Eigen::VectorXd& local) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (local[i] != 0.0) c.vector.emplace_back(rows[i], local[i]);
}

/// Quadrature point on a boundary facet with everything the facet terms need.
struct FacetPoint {
  BasisEval basis;
  Point normal;
  double weight;
  double a_n;
  Point a;
  double kappa;
  bool outflow;
};

template <class Fn>
void for_facet_points(const FESpace& space, const PhysicalModel& model, const BoundaryFacet& bf,
                      int degree, Fn fn) {
  const Mesh& mesh = space.mesh();
  const ElementKind kind = mesh.element(bf.element).kind;
  const QuadratureRule rule = facet_quadrature(mesh, degree);
  const Point n = mesh.facet_normal(bf.element, bf.local_facet);
  const double measure = mesh.facet_measure(bf.element, bf.local_facet);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    FacetPoint fp;
    const Point ref = facet_reference_point(kind, bf.local_facet, rule.points[q].x());
    fp.basis = eval_basis(space, bf.element, ref);
    fp.normal = n;
    fp.weight = rule.weights[q] * measure;
    fp.a = model.a(fp.basis.x);
    fp.a_n = fp.a.dot(n);
    fp.kappa = model.kappa(fp.basis.x);
    fp.outflow = fp.a_n >= 0.0;
    fn(fp);
  }
}

template <class Fn>
void for_volume_points(const FESpace& space, int e, int degree, Fn fn) {
  const QuadratureRule rule = quadrature(space.mesh().element(e).kind, degree);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const BasisEval be = eval_basis(space, e, rule.points[q]);
    fn(be, rule.weights[q] * be.det_j);
  }
}

const BoundaryCondition& bc_for(const PhysicalModel& model, const std::string& tag) {
  const auto it = model.bcs.find(tag);
  if (it == model.bcs.end()) throw ConfigError("no boundary condition for tag '" + tag + "'");
  return it->second;
}

int degree_of(const FESpace& space) { return 2 * space.order(); }

}  // namespace

SparseMatrix assemble_advection(const FESpace& space, const PhysicalModel& model, int threads) {
  const Mesh& mesh = space.mesh();
  const int deg = degree_of(space);
  Contribution vol = run_items(mesh.n_elements(), threads, [&](int e, Contribution& c) {
    const auto dofs = space.element_dofs(e);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    for_volume_points(space, e, deg, [&](const BasisEval& b, double w) {
      const Point a = model.a(b.x);
      const Eigen::VectorXd adv = b.gradients * a;
      local.noalias() -= w * adv * b.values.transpose();
    });
    push_local(c, dofs, dofs, local);
  });
  const auto facets = mesh.boundary_facets();
  Contribution bnd = run_items(static_cast<int>(facets.size()), threads, [&](int i,
                                                                              Contribution& c) {
    const auto dofs = space.element_dofs(facets[i].element);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    for_facet_points(space, model, facets[i], deg, [&](const FacetPoint& fp) {
      if (fp.outflow)
        local.noalias() += fp.weight * fp.a_n * fp.basis.values * fp.basis.values.transpose();
    });
    push_local(c, dofs, dofs, local);
  });
  vol.matrix.insert(vol.matrix.end(), bnd.matrix.begin(), bnd.matrix.end());
  return to_matrix(space.n_dofs(), std::move(vol.matrix));
}

SparseMatrix assemble_diffusion_nitsche(const FESpace& space, const PhysicalModel& model,
                                        const std::vector<ElementParams>& params, int threads) {
  const Mesh& mesh = space.mesh();
  const int deg = degree_of(space);
  Contribution vol = run_items(mesh.n_elements(), threads, [&](int e, Contribution& c) {
    const auto dofs = space.element_dofs(e);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    for_volume_points(space, e, deg, [&](const BasisEval& b, double w) {
      local.noalias() += w * model.kappa(b.x) * b.gradients * b.gradients.transpose();
    });
    push_local(c, dofs, dofs, local);
  });
  const auto facets = mesh.boundary_facets();
  Contribution bnd = run_items(static_cast<int>(facets.size()), threads, [&](int i,
                                                                              Contribution& c) {
    if (bc_for(model, facets[i].tag).kind != BcKind::dirichlet) return;
    const double beta = params[facets[i].element].beta;
    if (!(beta > 0.0)) throw ConfigError("missing penalty on a Dirichlet facet");
    const auto dofs = space.element_dofs(facets[i].element);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    for_facet_points(space, model, facets[i], deg, [&](const FacetPoint& fp) {
      const Eigen::VectorXd dn = fp.basis.gradients * fp.normal;
      const Eigen::VectorXd& N = fp.basis.values;
      const double kw = fp.kappa * fp.weight;
      local.noalias() -= kw * N * dn.transpose();
      local.noalias() -= kw * dn * N.transpose();
      local.noalias() += kw * beta * N * N.transpose();
    });
    push_local(c, dofs, dofs, local);
  });
  vol.matrix.insert(vol.matrix.end(), bnd.matrix.begin(), bnd.matrix.end());
  return to_matrix(space.n_dofs(), std::move(vol.matrix));
}

SparseMatrix assemble_vms_volume(const FESpace& space, const PhysicalModel& model,
                                 const std::vector<ElementParams>& params, Eigen::VectorXd* rhs,
                                 int threads) {
  const Mesh& mesh = space.mesh();
  const int deg = degree_of(space);
  Contribution vol = run_items(mesh.n_elements(), threads, [&](int e, Contribution& c) {
    const double tau = params[e].tau;
    if (tau == 0.0) return;
    const auto dofs = space.element_dofs(e);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    Eigen::VectorXd local_rhs = Eigen::VectorXd::Zero(dofs.size());
    for_volume_points(space, e, deg, [&](const BasisEval& b, double w) {
      const Point a = model.a(b.x);
      const Eigen::VectorXd adv = b.gradients * a;
      const Eigen::VectorXd residual = adv - model.kappa(b.x) * b.laplacians;
      local.noalias() += w * tau * adv * residual.transpose();
      if (rhs) local_rhs += w * tau * model.f(b.x) * adv;
    });
    push_local(c, dofs, dofs, local);
    if (rhs) push_local(c, dofs, local_rhs);
  });
  if (rhs) add_vector(*rhs, vol.vector);
  return to_matrix(space.n_dofs(), std::move(vol.matrix));
}

SparseMatrix assemble_vms_boundary(const FESpace& space, const PhysicalModel& model,
                                   const std::vector<ElementParams>& params, Eigen::VectorXd* rhs,
                                   int threads) {
  const Mesh& mesh = space.mesh();
  const int deg = degree_of(space);
  const auto facets = mesh.boundary_facets();
  Contribution bnd = run_items(static_cast<int>(facets.size()), threads, [&](int i,
                                                                              Contribution& c) {
    const BoundaryFacet& bf = facets[i];
    const BoundaryCondition& bc = bc_for(model, bf.tag);
    if (bc.kind != BcKind::dirichlet) return;
    const double gamma = params[bf.element].gamma.at(bf.local_facet);
    if (gamma == 0.0) return;
    const auto dofs = space.element_dofs(bf.element);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    Eigen::VectorXd local_rhs = Eigen::VectorXd::Zero(dofs.size());
    for_facet_points(space, model, bf, deg, [&](const FacetPoint& fp) {
      if (!fp.outflow) return;
      const Eigen::VectorXd adv = fp.basis.gradients * fp.a;
      local.noalias() += fp.weight * gamma * adv * fp.basis.values.transpose();
      if (rhs) local_rhs += fp.weight * gamma * bc.value(fp.basis.x) * adv;
    });
    push_local(c, dofs, dofs, local);
    if (rhs) push_local(c, dofs, local_rhs);
  });
  if (rhs) add_vector(*rhs, bnd.vector);
  return to_matrix(space.n_dofs(), std::move(bnd.matrix));
}

SparseMatrix assemble_exact_1d(const FESpace& space, const PhysicalModel& model,
                               const std::vector<ElementParams>& params, Eigen::VectorXd* rhs) {
  const Mesh& mesh = space.mesh();
  if (mesh.dimension() != 1) throw ConfigError("the exact_1d variant requires an interval mesh");
  const int P = space.order();
  Contribution c;
  const QuadratureRule gauss = gauss_legendre(P);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementParams& p = params[e];
    const LagrangeBasis& basis = space.basis(e);
    const auto dofs = space.element_dofs(e);
    const double h = mesh.element_measure(e);
    const double a = model.a(mesh.centroid(e)).x();
    // Leading coefficient of each basis function in the local coordinate x - x_left.
    const Eigen::VectorXd top = basis.monomial_coefficients().row(P).transpose() / std::pow(h, P);
    const double hp = std::pow(h, P - 1);
    Eigen::MatrixXd local = top * top.transpose() * (a * a * P * P * hp * hp * h * p.tau);
    push_local(c, dofs, dofs, local);
    if (rhs) {
      // x^{P-1} coefficient of the degree P-1 interpolant of f at Gauss points.
      Eigen::MatrixXd V(P, P);
      Eigen::VectorXd fv(P);
      for (int q = 0; q < P; ++q) {
        const double s = gauss.points[q].x();
        for (int k = 0; k < P; ++k) V(q, k) = std::pow(s * h, k);
        fv[q] = model.f(mesh.map_to_physical(e, Point(s, 0.0)));
      }
      const double f_top = V.fullPivLu().solve(fv)[P - 1];
      push_local(c, dofs, Eigen::VectorXd(top * (a * P * hp * hp * h * p.tau * f_top)));
    }
  }
  for (const BoundaryFacet& bf : mesh.boundary_facets()) {
    const BoundaryCondition& bc = bc_for(model, bf.tag);
    if (bc.kind != BcKind::dirichlet) continue;
    const ElementParams& p = params[bf.element];
    const double gamma = p.gamma.at(bf.local_facet);
    const LagrangeBasis& basis = space.basis(bf.element);
    const auto dofs = space.element_dofs(bf.element);
    const double h = mesh.element_measure(bf.element);
    const double a = model.a(mesh.centroid(bf.element)).x();
    const Eigen::VectorXd top = basis.monomial_coefficients().row(P).transpose() / std::pow(h, P);
    const Point ref = facet_reference_point(ElementKind::interval, bf.local_facet, 0.0);
    Eigen::VectorXd N;
    Eigen::MatrixX2d dN;
    basis.evaluate(ref, N, dN);
    const double scale = a * P * std::pow(h, P - 1) * gamma;
    push_local(c, dofs, dofs, Eigen::MatrixXd(scale * top * N.transpose()));
    if (rhs) {
      const Point x = mesh.map_to_physical(bf.element, ref);
      push_local(c, dofs, Eigen::VectorXd(scale * bc.value(x) * top));
    }
  }
  if (rhs) add_vector(*rhs, c.vector);
  return to_matrix(space.n_dofs(), std::move(c.matrix));
}

Eigen::VectorXd assemble_rhs(const FESpace& space, const PhysicalModel& model,
                             const std::vector<ElementParams>& params, int threads) {
  const Mesh& mesh = space.mesh();
  const int deg = degree_of(space);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs());
  Contribution vol = run_items(mesh.n_elements(), threads, [&](int e, Contribution& c) {
    const auto dofs = space.element_dofs(e);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(dofs.size());
    for_volume_points(space, e, deg,
                      [&](const BasisEval& b, double w) { local += w * model.f(b.x) * b.values; });
    push_local(c, dofs, local);
  });
  const auto facets = mesh.boundary_facets();
  Contribution bnd = run_items(static_cast<int>(facets.size()), threads, [&](int i,
                                                                              Contribution& c) {
    const BoundaryFacet& bf = facets[i];
    const BoundaryCondition& bc = bc_for(model, bf.tag);
    const auto dofs = space.element_dofs(bf.element);
    const double beta = params[bf.element].beta;
    Eigen::VectorXd local = Eigen::VectorXd::Zero(dofs.size());
    for_facet_points(space, model, bf, deg, [&](const FacetPoint& fp) {
      const double g = bc.value(fp.basis.x);
      const Eigen::VectorXd& N = fp.basis.values;
      if (bc.kind == BcKind::neumann) {
        local += fp.weight * g * N;
        return;
      }
      const Eigen::VectorXd dn = fp.basis.gradients * fp.normal;
      local += fp.weight * fp.kappa * g * (beta * N - dn);
      if (!fp.outflow) local -= fp.weight * fp.a_n * g * N;
    });
    push_local(c, dofs, local);
  });
  add_vector(rhs, vol.vector);
  add_vector(rhs, bnd.vector);
  return rhs;
}

DiscreteSystem assemble(const FESpace& space, const PhysicalModel& model,
                        const std::vector<ElementParams>& params, const AssemblyOptions& options) {
  DiscreteSystem sys;
  sys.n_dofs = space.n_dofs();
  const int threads = options.threads;
  sys.rhs = assemble_rhs(space, model, params, threads);
  sys.matrix = assemble_advection(space, model, threads);
  sys.matrix += assemble_diffusion_nitsche(space, model, params, threads);
  switch (options.variant) {
    case ModelVariant::galerkin_nitsche:
      break;
    case ModelVariant::classical_vms:
    case ModelVariant::augmented_vms:
      sys.matrix += assemble_vms_volume(space, model, params, &sys.rhs, threads);
      if (options.variant == ModelVariant::augmented_vms)
        sys.matrix += assemble_vms_boundary(space, model, params, &sys.rhs, threads);
      break;
    case ModelVariant::exact_1d:
      sys.matrix += assemble_exact_1d(space, model, params, &sys.rhs);
      break;
  }
  sys.matrix.makeCompressed();
  return sys;
}

NormGrams norm_grams(const FESpace& space, const PhysicalModel& model,
                     const std::vector<ElementParams>& params) {
  const Mesh& mesh = space.mesh();
  const int deg = degree_of(space);
  const int n = space.n_dofs();
  Contribution stream, stiff;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    Eigen::MatrixXd K = S;
    for_volume_points(space, e, deg, [&](const BasisEval& b, double w) {
      const Eigen::VectorXd adv = b.gradients * model.a(b.x);
      S.noalias() += w * params[e].tau * adv * adv.transpose();
      K.noalias() += w * model.kappa(b.x) * b.gradients * b.gradients.transpose();
    });
    push_local(stream, dofs, dofs, S);
    push_local(stiff, dofs, dofs, K);
  }
  Contribution badv, pen;
  for (const BoundaryFacet& bf : mesh.boundary_facets()) {
    const bool dirichlet = bc_for(model, bf.tag).kind == BcKind::dirichlet;
    const auto dofs = space.element_dofs(bf.element);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    Eigen::MatrixXd Pm = B;
    for_facet_points(space, model, bf, deg, [&](const FacetPoint& fp) {
      const Eigen::MatrixXd NN = fp.basis.values * fp.basis.values.transpose();
      B += fp.weight * std::abs(fp.a_n) * NN;
      if (dirichlet) Pm += fp.weight * fp.kappa * params[bf.element].beta * NN;
    });
    push_local(badv, dofs, dofs, B);
    push_local(pen, dofs, dofs, Pm);
  }
  return {to_matrix(n, std::move(stream.matrix)), to_matrix(n, std::move(badv.matrix)),
          to_matrix(n, std::move(stiff.matrix)), to_matrix(n, std::move(pen.matrix))};
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  char buf[64];
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << " " << it.col() + 1 << " " << buf << "\n";
    }
}

void write_vector_market(std::ostream& out, const Eigen::VectorXd& v) {
  char buf[64];
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out << buf << "\n";
  }
}

}  // namespace nvms
