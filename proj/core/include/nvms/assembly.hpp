// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nvms/femspace.hpp"
#include "nvms/greens.hpp"
#include "nvms/mesh.hpp"

namespace nvms {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct BoundaryCondition {
  BcKind kind = BcKind::dirichlet;
  /// Dirichlet value or Neumann diffusive flux kappa dphi/dn.
  ScalarFn value;
};

/// a . grad(phi) - div(kappa grad phi) = f with tagged boundary data. The
/// advection field is assumed solenoidal.
struct PhysicalModel {
  VectorFn a;
  ScalarFn kappa;
  ScalarFn f;
  std::map<std::string, BoundaryCondition> bcs;

  std::map<std::string, BcKind> bc_kinds() const;
};

enum class ModelVariant { galerkin_nitsche, classical_vms, augmented_vms, exact_1d };

const char* variant_name(ModelVariant v);
/// Accepts the names produced by variant_name; throws ConfigError otherwise.
ModelVariant parse_variant(const std::string& name);

/// Stabilization parameters of one element. gamma is indexed by local facet
/// and is only meaningful on boundary facets.
struct ElementParams {
  double h = 0.0;
  double a_norm = 0.0;
  double kappa = 0.0;
  double tau = 0.0;
  double beta = 0.0;
  std::vector<double> c_s;
  std::vector<double> gamma;
};

/// Per-element tau_eff / gamma_eff (Table-style harmonic means) or, for the
/// exact_1d variant, tau and gamma from Green's-function quadrature. beta is
/// taken from `beta` (one value per element).
std::vector<ElementParams> element_parameters(const FESpace& space, const PhysicalModel& model,
                                              ModelVariant variant, const std::vector<double>& beta,
                                              const GreensQuadrature& greens = {});

struct AssemblyOptions {
  ModelVariant variant = ModelVariant::augmented_vms;
  /// Worker threads for the element and facet loops; results do not depend on it.
  int threads = 1;
};

struct DiscreteSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  int n_dofs = 0;
};

/// Individual contributions. Each returns an n_dofs x n_dofs matrix.
SparseMatrix assemble_advection(const FESpace& space, const PhysicalModel& model, int threads = 1);
SparseMatrix assemble_diffusion_nitsche(const FESpace& space, const PhysicalModel& model,
                                        const std::vector<ElementParams>& params, int threads = 1);
/// Streamline residual term; adds (a . grad w tau, f) to `rhs` when non-null.
SparseMatrix assemble_vms_volume(const FESpace& space, const PhysicalModel& model,
                                 const std::vector<ElementParams>& params,
                                 Eigen::VectorXd* rhs = nullptr, int threads = 1);
/// Outflow Dirichlet boundary term; adds the matching data term to `rhs`.
SparseMatrix assemble_vms_boundary(const FESpace& space, const PhysicalModel& model,
                                   const std::vector<ElementParams>& params,
                                   Eigen::VectorXd* rhs = nullptr, int threads = 1);
/// Element-exact terms of the 1D model (replaces both VMS terms).
SparseMatrix assemble_exact_1d(const FESpace& space, const PhysicalModel& model,
                               const std::vector<ElementParams>& params,
                               Eigen::VectorXd* rhs = nullptr);
/// Galerkin and Nitsche right-hand side (without VMS data terms).
Eigen::VectorXd assemble_rhs(const FESpace& space, const PhysicalModel& model,
                             const std::vector<ElementParams>& params, int threads = 1);

/// Complete system for the selected variant.
DiscreteSystem assemble(const FESpace& space, const PhysicalModel& model,
                        const std::vector<ElementParams>& params, const AssemblyOptions& options);

/// Gram matrices of the norms in the coercivity bound.
struct NormGrams {
  SparseMatrix streamline;    // (tau a.grad w, a.grad v)
  SparseMatrix boundary_adv;  // <|a.n| w, v> over the whole boundary
  SparseMatrix stiffness;     // (kappa grad w, grad v)
  SparseMatrix penalty;       // <kappa beta w, v> over the Dirichlet boundary
};
NormGrams norm_grams(const FESpace& space, const PhysicalModel& model,
                     const std::vector<ElementParams>& params);

/// Coordinate-format dumps (MatrixMarket).
void write_matrix_market(std::ostream& out, const SparseMatrix& A);
void write_vector_market(std::ostream& out, const Eigen::VectorXd& v);

}  // namespace nvms
