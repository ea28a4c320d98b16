// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/solver.hpp"

#include <cmath>
#include <random>

#include <Eigen/SparseLU>

#include "nvms/errors.hpp"

namespace nvms {

namespace {

double norm1(const SparseMatrix& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& b, SolveReport* report,
                      const SolverOptions& options) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("solve: dimension mismatch");
  SparseMatrix M = A;
  M.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
    throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage(), INFINITY);

  // ||A^-1||_1 >= ||A^-1 v||_1 / ||v||_1 for a few fixed probe vectors.
  std::mt19937_64 rng(7);
  double inv_norm = 0.0;
  const Eigen::Index n = A.rows();
  for (int probe = 0; probe < 4; ++probe) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v[i] = probe == 0 ? 1.0 : ((rng() & 1) ? 1.0 : -1.0) * (1.0 + (rng() % 1000) * 1e-3);
    const Eigen::VectorXd x = lu.solve(v);
    inv_norm = std::max(inv_norm, x.lpNorm<1>() / v.lpNorm<1>());
  }
  const double cond = std::isfinite(inv_norm) ? norm1(M) * inv_norm : INFINITY;
  if (!(cond < options.max_condition))
    throw SolverError("system is singular or nearly singular", cond);

  Eigen::VectorXd x = lu.solve(b);
  const double bn = b.norm();
  const double res = (M * x - b).norm() / (bn > 0.0 ? bn : 1.0);
  if (!(res <= options.max_residual))
    throw SolverError("residual check failed (" + std::to_string(res) + ")", cond);
  if (report) *report = {res, cond};
  return x;
}

Eigen::VectorXd solve(const DiscreteSystem& system, SolveReport* report,
                      const SolverOptions& options) {
  return solve(system.matrix, system.rhs, report, options);
}

}  // namespace nvms
