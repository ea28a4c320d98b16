// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

namespace nvms {

enum class Facet1D { left, right };

/// Panel quadrature settings for element integrals. Panels are graded
/// geometrically toward interval ends on the layer scale kappa / |a|; each
/// panel is split into `subdivisions` equal parts with `points` Gauss points.
struct GreensQuadrature {
  int points = 20;
  int subdivisions = 1;
};

/// Element-local Green's function on [0, h] of the adjoint operator
/// -a d/dy - kappa d^2/dy^2 with homogeneous Dirichlet ends: (L* g(x, .))(y) = delta(y - x).
class Green1D {
 public:
  Green1D(double a, double kappa, double h);

  double a() const { return a_; }
  double kappa() const { return kappa_; }
  double h() const { return h_; }

  double operator()(double x, double y) const;
  /// dg/dy at y = 0 or y = h.
  double dy_at(double x, Facet1D facet) const;
  /// Boundary flux -kappa n . grad_y g at the facet (n = -1 left, +1 right).
  double flux(double x, Facet1D facet) const;

 private:
  double a_, kappa_, h_;
};

Green1D classical_green(double a, double kappa, double h);

/// Composite rule on [lo, hi] graded toward both ends with layer width `layer`.
void graded_rule(double lo, double hi, double layer, const GreensQuadrature& q,
                 std::vector<double>& x, std::vector<double>& w);

/// Scaled moments of the classical Green's function:
///   M(i, j) = int int (x/h)^i g(x, y) (y/h)^j dy dx,
///   G_F(i)  = int (x/h)^i flux(x, F) dx,   0 <= i, j <= n.
struct GreenMoments {
  Eigen::MatrixXd M;
  Eigen::VectorXd G_left, G_right;
};
GreenMoments green_moments(const Green1D& g, int n, const GreensQuadrature& q = {});

/// Fine-scale Green's function of order P: g minus the correction that makes
/// all (x^q, y^r) double moments with q < P-1 or r < P-1 vanish.
class FineScaleGreen1D {
 public:
  FineScaleGreen1D(int P, const Green1D& g, const GreensQuadrature& q = {});

  int order() const { return P_; }
  const Green1D& classical() const { return g_; }
  /// Moment matrix C(i, j) = int int x^i g y^j (unscaled), i, j < P-1.
  const Eigen::MatrixXd& moment_matrix() const { return C_; }

  double operator()(double x, double y) const;
  /// Boundary flux of g' at a facet.
  double flux(double x, Facet1D facet) const;

 private:
  /// u_j(x) = int y^j g(x, y) dy and v_i(y) = int x^i g(x, y) dx, j, i < P-1.
  Eigen::VectorXd u(double x) const;
  Eigen::VectorXd v(double y) const;

  int P_;
  Green1D g_;
  GreensQuadrature q_;
  Eigen::MatrixXd C_;
  Eigen::MatrixXd C_inv_;
  Eigen::VectorXd flux_v_left_, flux_v_right_;
};

FineScaleGreen1D fine_scale_green(int P, double a, double kappa, double h,
                                  const GreensQuadrature& q = {});

/// (1/h) int int (x/h)^{P-1} g'(x, y) (y/h)^{P-1} dy dx by quadrature.
double tau_by_quadrature(int P, double a, double kappa, double h, const GreensQuadrature& q = {});

/// int (x/h)^{P-1} flux of g' at the facet dx by quadrature.
double gamma_by_quadrature(int P, double a, double kappa, double h, Facet1D facet,
                           const GreensQuadrature& q = {});

/// int (x/h)^{Q-1} flux of g' (order P) at the facet dx, 1 <= Q <= P,
/// integrating the pointwise fine-scale flux. Vanishes for Q < P.
double gamma_moment(int Q, int P, double a, double kappa, double h, Facet1D facet,
                    const GreensQuadrature& q = {});

}  // namespace nvms
