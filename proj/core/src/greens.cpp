// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/greens.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "nvms/errors.hpp"
#include "nvms/quadrature.hpp"

namespace nvms {

namespace {

/// (1 - e^{-r s}) / r, with the r -> 0 limit s.
double E(double r, double s) { return r == 0.0 ? s : -std::expm1(-r * s) / r; }

double layer_width(double a, double kappa) {
  return a == 0.0 ? std::numeric_limits<double>::infinity() : kappa / std::abs(a);
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

Green1D::Green1D(double a, double kappa, double h) : a_(a), kappa_(kappa), h_(h) {
  if (!(kappa > 0.0)) throw std::invalid_argument("Green1D: kappa must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("Green1D: h must be positive");
}

double Green1D::operator()(double x, double y) const {
  if (a_ < 0.0) return Green1D(-a_, kappa_, h_)(h_ - x, h_ - y);
  const double r = a_ / kappa_;
  const double denom = kappa_ * E(r, h_);
  if (y <= x) return E(r, y) * E(r, h_ - x) / denom;
  return E(r, x) * std::exp(-r * (y - x)) * E(r, h_ - y) / denom;
}

double Green1D::dy_at(double x, Facet1D facet) const {
  if (a_ < 0.0) {
    const Green1D mirror(-a_, kappa_, h_);
    return -mirror.dy_at(h_ - x, facet == Facet1D::left ? Facet1D::right : Facet1D::left);
  }
  const double r = a_ / kappa_;
  const double denom = kappa_ * E(r, h_);
  if (facet == Facet1D::left) return E(r, h_ - x) / denom;
  return -E(r, x) * std::exp(-r * (h_ - x)) / denom;
}

double Green1D::flux(double x, Facet1D facet) const {
  const double n = facet == Facet1D::left ? -1.0 : 1.0;
  return -kappa_ * n * dy_at(x, facet);
}

Green1D classical_green(double a, double kappa, double h) { return Green1D(a, kappa, h); }

void graded_rule(double lo, double hi, double layer, const GreensQuadrature& q,
                 std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  const double L = hi - lo;
  if (!(L > 0.0)) return;
  std::vector<double> breaks{0.0};
  if (L > 4.0 * layer) {
    // Geometric breakpoints d, 2d, 4d, ... from each end up to the midpoint.
    std::vector<double> near;
    for (double d = 0.25 * layer; d < 0.5 * L; d *= 2.0) near.push_back(d);
    for (double d : near) breaks.push_back(d);
    for (auto it = near.rbegin(); it != near.rend(); ++it) breaks.push_back(L - *it);
  } else {
    breaks.push_back(0.5 * L);
  }
  breaks.push_back(L);
  const QuadratureRule g = gauss_legendre(q.points);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double width = (breaks[p + 1] - breaks[p]) / q.subdivisions;
    for (int s = 0; s < q.subdivisions; ++s) {
      const double start = lo + breaks[p] + s * width;
      for (std::size_t k = 0; k < g.size(); ++k) {
        x.push_back(start + width * g.points[k].x());
        w.push_back(width * g.weights[k]);
      }
    }
  }
}

GreenMoments green_moments(const Green1D& g, int n, const GreensQuadrature& q) {
  const double h = g.h();
  const double layer = layer_width(g.a(), g.kappa());
  GreenMoments m;
  m.M = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.G_left = Eigen::VectorXd::Zero(n + 1);
  m.G_right = Eigen::VectorXd::Zero(n + 1);
  std::vector<double> xs, xw, ys, yw;
  graded_rule(0.0, h, layer, q, xs, xw);
  Eigen::VectorXd inner(n + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    inner.setZero();
    // Split at the derivative kink y = x.
    for (int side = 0; side < 2; ++side) {
      graded_rule(side == 0 ? 0.0 : x, side == 0 ? x : h, layer, q, ys, yw);
      for (std::size_t k = 0; k < ys.size(); ++k) {
        const double val = yw[k] * g(x, ys[k]);
        for (int j = 0; j <= n; ++j) inner[j] += val * ipow(ys[k] / h, j);
      }
    }
    const double fl = g.flux(x, Facet1D::left), fr = g.flux(x, Facet1D::right);
    for (int r = 0; r <= n; ++r) {
      const double wx = xw[i] * ipow(x / h, r);
      m.M.row(r) += wx * inner.transpose();
      m.G_left[r] += wx * fl;
      m.G_right[r] += wx * fr;
    }
  }
  return m;
}

namespace {

void check_order(int P) {
  if (P < 1 || P > 3) throw std::invalid_argument("unsupported order " + std::to_string(P));
}

/// Inverse of the leading n x n block of scaled moments.
Eigen::MatrixXd inverse_block(const Eigen::MatrixXd& M, int n) {
  if (n == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::MatrixXd C = M.topLeftCorner(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  const double cond = C.norm() * (lu.isInvertible() ? lu.inverse().norm() : INFINITY);
  if (!lu.isInvertible() || !(cond < 1e13))
    throw SolverError("singular Green's function moment matrix", cond);
  return lu.inverse();
}

/// Weighted Schur-type correction: value - row^T C^-1 col.
double corrected(const GreenMoments& m, int n, double value, const Eigen::VectorXd& col) {
  if (n == 0) return value;
  const Eigen::MatrixXd Ci = inverse_block(m.M, n);
  const Eigen::VectorXd row = m.M.row(n).head(n).transpose();
  return value - row.dot(Ci * col.head(n));
}

}  // namespace

FineScaleGreen1D::FineScaleGreen1D(int P, const Green1D& g, const GreensQuadrature& q)
    : P_(P), g_(g), q_(q) {
  check_order(P);
  const int n = P - 1;
  if (n == 0) return;
  const GreenMoments m = green_moments(g, n, q);
  const double h = g.h();
  C_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C_(i, j) = m.M(i, j) * ipow(h, i + j);
  const Eigen::MatrixXd Ci_scaled = inverse_block(m.M, n);
  C_inv_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C_inv_(i, j) = Ci_scaled(i, j) / ipow(h, i + j);
  flux_v_left_.resize(n);
  flux_v_right_.resize(n);
  for (int i = 0; i < n; ++i) {
    flux_v_left_[i] = m.G_left[i] * ipow(h, i);
    flux_v_right_[i] = m.G_right[i] * ipow(h, i);
  }
}

Eigen::VectorXd FineScaleGreen1D::u(double x) const {
  const int n = P_ - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::vector<double> ys, yw;
  const double layer = layer_width(g_.a(), g_.kappa());
  for (int side = 0; side < 2; ++side) {
    graded_rule(side == 0 ? 0.0 : x, side == 0 ? x : g_.h(), layer, q_, ys, yw);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double val = yw[k] * g_(x, ys[k]);
      for (int j = 0; j < n; ++j) out[j] += val * ipow(ys[k], j);
    }
  }
  return out;
}

Eigen::VectorXd FineScaleGreen1D::v(double y) const {
  const int n = P_ - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::vector<double> xs, xw;
  const double layer = layer_width(g_.a(), g_.kappa());
  for (int side = 0; side < 2; ++side) {
    graded_rule(side == 0 ? 0.0 : y, side == 0 ? y : g_.h(), layer, q_, xs, xw);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double val = xw[k] * g_(xs[k], y);
      for (int i = 0; i < n; ++i) out[i] += val * ipow(xs[k], i);
    }
  }
  return out;
}

double FineScaleGreen1D::operator()(double x, double y) const {
  if (P_ == 1) return g_(x, y);
  return g_(x, y) - u(x).dot(C_inv_ * v(y));
}

double FineScaleGreen1D::flux(double x, Facet1D facet) const {
  if (P_ == 1) return g_.flux(x, facet);
  const Eigen::VectorXd& fv = facet == Facet1D::left ? flux_v_left_ : flux_v_right_;
  return g_.flux(x, facet) - u(x).dot(C_inv_ * fv);
}

FineScaleGreen1D fine_scale_green(int P, double a, double kappa, double h,
                                  const GreensQuadrature& q) {
  return FineScaleGreen1D(P, classical_green(a, kappa, h), q);
}

double tau_by_quadrature(int P, double a, double kappa, double h, const GreensQuadrature& q) {
  check_order(P);
  const int n = P - 1;
  const GreenMoments m = green_moments(classical_green(a, kappa, h), n, q);
  const Eigen::VectorXd col = m.M.col(n);
  return corrected(m, n, m.M(n, n), col) / h;
}

double gamma_by_quadrature(int P, double a, double kappa, double h, Facet1D facet,
                           const GreensQuadrature& q) {
  check_order(P);
  const int n = P - 1;
  const GreenMoments m = green_moments(classical_green(a, kappa, h), n, q);
  const Eigen::VectorXd& G = facet == Facet1D::left ? m.G_left : m.G_right;
  return corrected(m, n, G[n], G);
}

double gamma_moment(int Q, int P, double a, double kappa, double h, Facet1D facet,
                    const GreensQuadrature& q) {
  check_order(P);
  if (Q < 1 || Q > P) throw std::invalid_argument("gamma_moment: need 1 <= Q <= P");
  // Direct route: integrate the pointwise fine-scale flux.
  const FineScaleGreen1D gp = fine_scale_green(P, a, kappa, h, q);
  std::vector<double> xs, xw;
  graded_rule(0.0, h, layer_width(a, kappa), q, xs, xw);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    sum += xw[i] * ipow(xs[i] / h, Q - 1) * gp.flux(xs[i], facet);
  return sum;
}

}  // namespace nvms
