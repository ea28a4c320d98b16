// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "nvms/assembly.hpp"
#include "nvms/femspace.hpp"
#include "nvms/mesh.hpp"

namespace nvms::testing {

inline std::string data_path(const std::string& name) {
  return std::string(NVMS_TEST_DATA) + "/" + name;
}

/// Constant-coefficient model with homogeneous data on every tag of `mesh`.
inline PhysicalModel constant_model(const Mesh& mesh, double ax, double ay, double kappa,
                                    double f = 0.0, BcKind kind = BcKind::dirichlet) {
  PhysicalModel m;
  m.a = constant_vector(ax, ay);
  m.kappa = constant_field(kappa);
  m.f = constant_field(f);
  for (const std::string& tag : mesh.boundary_tags()) m.bcs[tag] = {kind, constant_field(0.0)};
  return m;
}

inline std::shared_ptr<const Mesh> share(Mesh mesh) {
  return std::make_shared<const Mesh>(std::move(mesh));
}

inline Eigen::MatrixXd dense(const SparseMatrix& A) { return Eigen::MatrixXd(A); }

inline double relative(double value, double expected) {
  return std::abs(value - expected) / std::max(std::abs(expected), 1e-300);
}

}  // namespace nvms::testing
