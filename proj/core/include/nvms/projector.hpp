// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nvms/assembly.hpp"
#include "nvms/femspace.hpp"
#include "nvms/meshgen.hpp"

namespace nvms {

/// Reference value and gradient at a quadrature point of a coarse element or
/// boundary facet. `ref` is in the coarse element's reference coordinates and
/// `weight` already contains the physical measure.
struct ReferenceSample {
  Point ref = Point::Zero();
  Point x = Point::Zero();
  double weight = 0.0;
  double value = 0.0;
  Point gradient = Point::Zero();
};

enum class ReferenceKind { analytic, overrefined };

/// A field that coarse-space projections integrate against.
class ReferenceField {
 public:
  virtual ~ReferenceField() = default;
  virtual ReferenceKind kind() const = 0;
  /// Quadrature samples covering coarse element `element` of `coarse`.
  virtual std::vector<ReferenceSample> volume_samples(const Mesh& coarse, int element) const = 0;
  /// Samples on coarse boundary facet `facet` (index into boundary_facets()).
  virtual std::vector<ReferenceSample> facet_samples(const Mesh& coarse, int facet) const = 0;
  /// Pointwise value and gradient.
  virtual FieldSample value_at(const Point& x) const = 0;
  virtual std::shared_ptr<const ReferenceField> clone() const = 0;
};

/// Closed-form field. Integrals use a rule of `degree` on each of the
/// `subdivisions`^dim uniform sub-cells of every coarse element and facet.
class AnalyticReference final : public ReferenceField {
 public:
  AnalyticReference(ScalarFn value, VectorFn gradient, int degree = 19, int subdivisions = 4);
  ReferenceKind kind() const override { return ReferenceKind::analytic; }
  std::vector<ReferenceSample> volume_samples(const Mesh& coarse, int element) const override;
  std::vector<ReferenceSample> facet_samples(const Mesh& coarse, int facet) const override;
  FieldSample value_at(const Point& x) const override;
  std::shared_ptr<const ReferenceField> clone() const override;

 private:
  ScalarFn value_;
  VectorFn gradient_;
  int degree_;
  int subdivisions_;
};

/// Finite-element field on a nested refinement of the coarse mesh. Samples
/// are the fine quadrature points (rule of `degree` per child) mapped into the
/// parent elements; normal derivatives are the point values of the fine
/// gradient.
class OverrefinedReference final : public ReferenceField {
 public:
  /// Throws ConfigError when the fine mesh's largest element exceeds 1/8 of
  /// the coarse mesh's smallest element.
  OverrefinedReference(const Mesh& coarse, std::shared_ptr<const RefinedMesh> refined,
                       std::shared_ptr<const FESpace> fine_space, Eigen::VectorXd coefficients,
                       int degree = 6);
  ReferenceKind kind() const override { return ReferenceKind::overrefined; }
  std::vector<ReferenceSample> volume_samples(const Mesh& coarse, int element) const override;
  std::vector<ReferenceSample> facet_samples(const Mesh& coarse, int facet) const override;
  FieldSample value_at(const Point& x) const override;
  std::shared_ptr<const ReferenceField> clone() const override;

  const FESpace& fine_space() const { return *space_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }

 private:
  std::shared_ptr<const RefinedMesh> refined_;
  std::shared_ptr<const FESpace> space_;
  Eigen::VectorXd coeffs_;
  int degree_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> facet_children_;
};

struct ProjectionResult {
  Eigen::VectorXd coefficients;
  double condition_estimate = 0.0;
  /// False when the projection system was indefinite and the stationary point
  /// of the functional was returned instead of a minimizer.
  bool definite = true;
  /// Fine-scale field phi - phi_h.
  FieldSample fine_scale(const Point& x) const;

  std::shared_ptr<const FESpace> space;
  std::shared_ptr<const ReferenceField> reference;
};

/// Minimizer over the coarse space of
///   1/2 |kappa^1/2 grad e|^2 - <kappa d_n e, e>_D + 1/2 <kappa beta e, e>_D + 1/2 <a.n e, e>_out,
/// e = phi - phi_h. `beta` holds one value per element; the model supplies a,
/// kappa and the Dirichlet tags. Throws SolverError when the system is singular,
/// or indefinite unless `allow_indefinite` is set.
struct ProjectionOptions {
  bool allow_indefinite = false;
};
ProjectionResult nitsche_project(const FESpace& space, const std::vector<double>& beta,
                                 const ReferenceField& reference, const PhysicalModel& model,
                                 const ProjectionOptions& options = {});

/// Left-hand side and reference pairing of the projection system.
struct ProjectionSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};
ProjectionSystem nitsche_system(const FESpace& space, const std::vector<double>& beta,
                                const ReferenceField& reference, const PhysicalModel& model);

/// Value of the minimized functional at coefficients `coeffs`.
double nitsche_objective(const FESpace& space, const std::vector<double>& beta,
                         const ReferenceField& reference, const PhysicalModel& model,
                         const Eigen::VectorXd& coeffs);

/// Fine-scale optimality residual per coarse basis function, with e = phi - phi_h:
///   -(grad v, kappa grad e) + <v, kappa d_n e>_D + <kappa d_n v, e>_D
///   - <kappa beta v, e>_D - <a.n v, e>_out.
Eigen::VectorXd nitsche_residual(const FESpace& space, const std::vector<double>& beta,
                                 const ReferenceField& reference, const PhysicalModel& model,
                                 const Eigen::VectorXd& coeffs);

/// 1D: nodal values at every node plus vanishing element moments
/// int_K (phi - phi_h) x^p, p <= P-2. 2D: boundary dofs interpolate phi and
/// the remaining dofs minimize |grad (phi - phi_h)| (a choice of this library;
/// the 1D constraints have no direct 2D counterpart).
ProjectionResult h10_project(const FESpace& space, const ReferenceField& reference);

/// Recovered diffusive flux at the facet quadrature points of a Dirichlet
/// boundary facet: -kappa d_n phi_h + kappa beta (phi_h - phi_D), plus
/// a.n (phi_h - phi_D) where the point is outflow.
struct FluxSample {
  Point x = Point::Zero();
  double weight = 0.0;
  double flux = 0.0;
  /// -kappa d_n phi_h alone.
  double naive = 0.0;
};
std::vector<FluxSample> recover_flux(const FESpace& space, const Eigen::VectorXd& coeffs,
                                     int facet, double beta, const PhysicalModel& model);

/// Sharpest discrete trace constants
///   T1 = sup |d_n w|^2_D / |grad w|^2,  T2 = sup |a.grad w|^2_{D,out} / |a.grad w|^2.
/// With `weights` (one per element) both norms of T2 carry the element weight.
/// T2 is 0 when a vanishes or no Dirichlet point is outflow.
struct InverseConstants {
  double T1 = 0.0;
  double T2 = 0.0;
};
InverseConstants inverse_constants(const FESpace& space, const PhysicalModel& model,
                                   const std::vector<double>* weights = nullptr);

/// Largest generalized eigenvalue of (B, A) on the range of A. Directions with
/// eigenvalue of A below threshold * max diag(A) are discarded.
double max_generalized_eigenvalue(const Eigen::MatrixXd& B, const Eigen::MatrixXd& A,
                                  double threshold = 1e-12);

}  // namespace nvms
