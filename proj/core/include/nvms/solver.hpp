// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include "nvms/assembly.hpp"

namespace nvms {

struct SolveReport {
  /// ||A x - b|| / ||b|| (absolute when b = 0).
  double residual = 0.0;
  /// Lower estimate of the 1-norm condition number.
  double condition_estimate = 0.0;
};

struct SolverOptions {
  double max_residual = 1e-10;
  double max_condition = 1e14;
};

/// Direct sparse LU solve. Throws SolverError when the factorization fails,
/// the condition estimate exceeds the limit or the residual check fails.
Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& b, SolveReport* report = nullptr,
                      const SolverOptions& options = {});
Eigen::VectorXd solve(const DiscreteSystem& system, SolveReport* report = nullptr,
                      const SolverOptions& options = {});

}  // namespace nvms
