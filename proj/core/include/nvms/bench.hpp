// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nvms/assembly.hpp"
#include "nvms/config.hpp"
#include "nvms/csv.hpp"
#include "nvms/projector.hpp"
#include "nvms/solver.hpp"

namespace nvms {

/// Closed-form solution of a phi' - kappa phi'' = f on [x_left, x_right] with
/// constant a, kappa, polynomial f and Dirichlet values at both ends.
class Exact1D {
 public:
  /// `f` holds monomial coefficients in (x - x_left).
  Exact1D(double a, double kappa, std::vector<double> f, double x_left, double x_right,
          double phi_left, double phi_right);
  double value(double x) const;
  double derivative(double x) const;
  AnalyticReference reference(int degree = 19, int subdivisions = 4) const;

 private:
  double a_, kappa_, x_left_, length_;
  std::vector<double> particular_;  // monomials in (x - x_left)
  double c1_ = 0.0, c2_ = 0.0;
};

/// Monomial coefficients in (x - x_left) of a polynomial f of degree <= max_degree,
/// recovered by interpolation. Throws ConfigError when f is not such a polynomial.
std::vector<double> polynomial_coefficients(const ScalarFn& f, double x_left, double x_right,
                                            int max_degree = 8);

/// Builds the mesh described by the configuration.
Mesh build_mesh(const MeshSource& source);

/// Per-element penalty for a configuration on `space`.
std::vector<double> beta_for(const FESpace& space, const PhysicalModel& model,
                             const RunConfig& config);

struct VariantSolve {
  ModelVariant variant = ModelVariant::augmented_vms;
  DiscreteSystem system;
  Eigen::VectorXd coefficients;
  SolveReport report;
};
VariantSolve solve_variant(const FESpace& space, const PhysicalModel& model, ModelVariant variant,
                           const std::vector<double>& beta, int threads = 1);

/// L2 distance between two fields of `space`, using a rule of `degree`.
double l2_distance(const FESpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                   int degree);
/// L2 distance between a field of `space` and a reference field.
double l2_error(const FESpace& space, const Eigen::VectorXd& u, const ReferenceField& reference);
/// || u - phi_D || over the Dirichlet boundary.
double boundary_trace_error(const FESpace& space, const Eigen::VectorXd& u,
                            const PhysicalModel& model, int degree);
/// Per element: int_K (u - v)^2 / |K|.
std::vector<double> element_error_density(const FESpace& space, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& v, int degree);

struct ErrorReport {
  ModelVariant variant = ModelVariant::augmented_vms;
  double l2_reference = 0.0;
  /// Distance to the Nitsche projection of the reference.
  double l2_projected = 0.0;
  /// Largest error at interior mesh nodes (1D only, NaN otherwise).
  double nodal_max = std::numeric_limits<double>::quiet_NaN();
  double boundary_trace = 0.0;
  int dofs = 0;
  double h_max = 0.0;
  double condition_estimate = 0.0;
};

struct CaseResult {
  std::shared_ptr<const FESpace> space;
  PhysicalModel model;
  std::vector<double> beta;
  std::shared_ptr<const ReferenceField> reference;
  ProjectionResult projection;
  std::vector<VariantSolve> solves;
  std::vector<ErrorReport> errors;
  /// Overrefined reference details (2D); zero for analytic references.
  int reference_refine = 0;
  int reference_elements = 0;
};

/// All configured variants on an interval mesh against the closed-form
/// solution (or the configured analytic reference).
CaseResult run_case_1d(const RunConfig& config);

/// All configured variants on a 2D mesh against the Nitsche projection of an
/// overrefined classical VMS solve (or the configured analytic reference).
CaseResult run_case_2d(const RunConfig& config);

/// run_case_1d or run_case_2d depending on the mesh dimension.
CaseResult run_case(const RunConfig& config);

/// One row per variant: errors, dofs, h, conditioning.
Table error_table(const CaseResult& result);
/// 1D: exact, projected and per-variant values and fine scales on a uniform
/// grid. 2D: the same along the diagonal y = x (points outside the mesh skipped).
Table sample_table(const CaseResult& result, int points);
/// 2D: centroid and per-variant error density against the projected reference.
Table element_table(const CaseResult& result);

/// Mesh levels of a sweep: h values for hole generators, element counts
/// (or nx = ny) otherwise. Missing lists default to halving sizes.
std::vector<RunConfig> sweep_levels(const RunConfig& config, int levels);

/// Per level: h_max, dofs and per-variant errors. Levels run on up to
/// config.sweep.threads workers; rows keep level order. A failing level
/// ends the table with a row whose status is "failed".
Table convergence_sweep(const RunConfig& config, int levels);

/// Pe, then xi_P, xi~_P, eta_P, eta~_P for each order.
Table param_table(const std::vector<double>& pe, const std::vector<int>& orders);
/// Pe, P, closed-form xi and eta next to their Green's-function quadratures.
Table greens_table(const std::vector<double>& pe, const std::vector<int>& orders,
                   const GreensQuadrature& q = {});

/// Logarithmically spaced values.
std::vector<double> log_grid(double lo, double hi, int count);

/// Writes <dir>/<prefix>_errors.csv, _samples.csv, (2D) _elements.csv, the
/// gnuplot stub and optional MatrixMarket dumps. Returns the written paths.
std::vector<std::string> write_case_outputs(const CaseResult& result, const RunConfig& config);

}  // namespace nvms
