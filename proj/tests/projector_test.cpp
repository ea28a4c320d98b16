// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nvms/bench.hpp"
#include "nvms/errors.hpp"
#include "nvms/meshgen.hpp"
#include "nvms/params.hpp"
#include "nvms/projector.hpp"
#include "nvms/quadrature.hpp"
#include "test_support.hpp"

namespace nvms {
namespace {

using testing::constant_model;
using testing::relative;
using testing::share;

constexpr double kA = 0.8, kKappa = 0.02, kLength = 0.3;

/// The boundary-layer solution with f = 1 and zero end values.
Exact1D layer() { return Exact1D(kA, kKappa, {1.0}, 0.0, kLength, 0.0, 0.0); }

std::vector<double> experiment_beta(const FESpace& s) {
  return beta_choice(s, BetaPolicy::experiment);
}

ProjectionResult project_layer(const FESpace& s, const std::vector<double>& beta) {
  const PhysicalModel m = constant_model(s.mesh(), kA, 0.0, kKappa, 1.0);
  return nitsche_project(s, beta, layer().reference(), m, {.allow_indefinite = true});
}

AnalyticReference polynomial_reference(int P) {
  auto value = [P](const Point& p) {
    const double x = p.x(), y = p.y();
    return 0.2 + x - 0.5 * y + (P >= 2 ? x * y - 2 * x * x : 0.0) + (P >= 3 ? x * x * x : 0.0);
  };
  auto grad = [P](const Point& p) {
    const double x = p.x(), y = p.y();
    return Point(1.0 + (P >= 2 ? y - 4 * x : 0.0) + (P >= 3 ? 3 * x * x : 0.0),
                 -0.5 + (P >= 2 ? x : 0.0));
  };
  return AnalyticReference(value, grad);
}

TEST(NitscheProjection, IdempotentOnTheCoarseSpace) {
  for (int P = 1; P <= 3; ++P) {
    for (const Mesh& mesh : {build_interval_mesh(0.0, kLength, 3),
                             unit_square_mesh(3, 3, ElementKind::triangle, 0.25)}) {
      const FESpace s = make_space(mesh, P);
      const PhysicalModel m = constant_model(mesh, 0.6, 0.2, 0.05);
      const AnalyticReference ref = polynomial_reference(P);
      const Eigen::VectorXd expected = s.interpolate([&](const Point& x) { return ref.value_at(x).value; });
      const ProjectionResult nit =
          nitsche_project(s, experiment_beta(s), ref, m, {.allow_indefinite = true});
      EXPECT_LT((nit.coefficients - expected).cwiseAbs().maxCoeff(), 1e-10) << "P=" << P;
      const ProjectionResult h10 = h10_project(s, ref);
      EXPECT_LT((h10.coefficients - expected).cwiseAbs().maxCoeff(), 1e-10) << "P=" << P;
    }
  }
}

TEST(NitscheProjection, MinimizesTheFunctional) {
  for (int P = 1; P <= 3; ++P) {
    const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), P);
    const PhysicalModel m = constant_model(s.mesh(), kA, 0.0, kKappa, 1.0);
    const InverseConstants ic = inverse_constants(s, m);
    const std::vector<double> beta(3, 4.0 * ic.T1);
    const AnalyticReference ref = layer().reference();
    const ProjectionResult r = nitsche_project(s, beta, ref, m);
    EXPECT_TRUE(r.definite);
    const double J0 = nitsche_objective(s, beta, ref, m, r.coefficients);
    std::mt19937 rng(P);
    std::uniform_int_distribution<int> pick(0, s.n_dofs() - 1);
    for (int k = 0; k < 20; ++k) {
      const int d = pick(rng);
      for (double eps : {1e-4, -1e-4}) {
        Eigen::VectorXd c = r.coefficients;
        c[d] += eps;
        EXPECT_GT(nitsche_objective(s, beta, ref, m, c), J0) << "P=" << P << " dof " << d;
      }
    }
  }
}

TEST(NitscheProjection, OrthogonalityResidualVanishes) {
  struct Case {
    Mesh mesh;
    double ax, ay;
  };
  std::vector<Case> cases;
  cases.push_back({build_interval_mesh(0.0, kLength, 3), kA, 0.0});
  cases.push_back({unit_square_mesh(3, 3, ElementKind::triangle, 0.2), 0.7, 0.4});
  cases.push_back({unit_square_mesh(2, 3, ElementKind::quad), -0.3, 0.9});
  for (const Case& c : cases)
    for (int P = 1; P <= 3; ++P) {
      const FESpace s = make_space(c.mesh, P);
      const PhysicalModel m = constant_model(c.mesh, c.ax, c.ay, kKappa);
      const AnalyticReference ref(
          [](const Point& p) { return std::exp(p.x()) * std::sin(2 * p.y() + 0.3); },
          [](const Point& p) {
            return Point(std::exp(p.x()) * std::sin(2 * p.y() + 0.3),
                         2 * std::exp(p.x()) * std::cos(2 * p.y() + 0.3));
          });
      const std::vector<double> beta = experiment_beta(s);
      const ProjectionResult r = nitsche_project(s, beta, ref, m, {.allow_indefinite = true});
      const Eigen::VectorXd res = nitsche_residual(s, beta, ref, m, r.coefficients);
      const double scale = nitsche_system(s, beta, ref, m).rhs.cwiseAbs().maxCoeff();
      EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-8 * scale) << "P=" << P;
    }
}

TEST(NitscheProjection, LargePenaltyApproachesTheTrace) {
  const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), 2);
  const Exact1D exact(kA, kKappa, {1.0}, 0.0, kLength, 0.5, -0.2);
  const PhysicalModel m = constant_model(s.mesh(), kA, 0.0, kKappa);
  double previous = std::numeric_limits<double>::infinity();
  for (double factor : {10.0, 1e2, 1e4, 1e6}) {
    const std::vector<double> beta(3, factor / 0.1);
    const ProjectionResult r = nitsche_project(s, beta, exact.reference(), m);
    const double err = std::abs(r.coefficients[0] - 0.5) + std::abs(r.coefficients[3] + 0.2);
    EXPECT_LT(err, previous) << factor;
    previous = err;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(NitscheProjection, OneDimensionalConstraints) {
  const Exact1D exact = layer();
  for (int P = 1; P <= 3; ++P) {
    const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), P);
    const ProjectionResult r = project_layer(s, experiment_beta(s));
    double scale = 0.0;
    for (int i = 0; i <= 300; ++i) scale = std::max(scale, std::abs(exact.value(i * kLength / 300)));

    for (double x : {0.1, 0.2})
      EXPECT_LT(std::abs(r.fine_scale(Point(x, 0)).value), 1e-9 * scale) << "P=" << P;

    const QuadratureRule q = quadrature(ElementKind::interval, 20);
    for (int e = 0; e < 3; ++e)
      for (int p = 0; p <= P - 2; ++p) {
        double moment = 0.0, mass = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
          const double x = 0.1 * (e + q.points[k].x());
          moment += 0.1 * q.weights[k] * r.fine_scale(Point(x, 0)).value * std::pow(x, p);
          mass += 0.1 * q.weights[k] * std::abs(exact.value(x)) * std::pow(x, p);
        }
        EXPECT_LT(std::abs(moment), 1e-9 * mass) << "P=" << P << " e=" << e << " p=" << p;
      }

    // Left end is inflow, right end outflow; d_n is -d/dx on the left.
    const double beta = experiment_beta(s)[0];
    const FieldSample left = r.fine_scale(Point(0.0, 0));
    const FieldSample right = r.fine_scale(Point(kLength, 0));
    const double flux_left = kKappa * -left.gradient.x(), flux_right = kKappa * right.gradient.x();
    EXPECT_LT(std::abs(flux_left - kKappa * beta * left.value), 1e-8 * std::abs(flux_left));
    EXPECT_LT(std::abs(flux_right - (kKappa * beta + kA) * right.value), 1e-8 * std::abs(flux_right));
  }
}

TEST(NitscheProjection, IndefinitePenaltyIsReported) {
  const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), 2);
  const PhysicalModel m = constant_model(s.mesh(), kA, 0.0, kKappa, 1.0);
  const std::vector<double> beta(3, 0.5 / 0.1);
  EXPECT_THROW(nitsche_project(s, beta, layer().reference(), m), SolverError);
  EXPECT_FALSE(project_layer(s, beta).definite);
}

TEST(H10Projection, LinearIsTheInterpolant) {
  const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), 1);
  const Exact1D exact = layer();
  const ProjectionResult r = h10_project(s, exact.reference());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.coefficients[i], exact.value(0.1 * i), 1e-14);
}

TEST(H10Projection, QuadraticElementMeanIsExact) {
  const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), 2);
  const Exact1D exact = layer();
  const ProjectionResult r = h10_project(s, exact.reference());
  const QuadratureRule q = quadrature(ElementKind::interval, 20);
  for (int e = 0; e < 3; ++e) {
    double mean = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k)
      mean += q.weights[k] * r.fine_scale(Point(0.1 * (e + q.points[k].x()), 0)).value;
    EXPECT_LT(std::abs(mean), 1e-10) << e;
  }
}

TEST(FluxRecovery, RecoversTheExactDiffusiveFlux) {
  const Exact1D exact = layer();
  for (int P = 1; P <= 3; ++P) {
    const FESpace s = make_space(build_interval_mesh(0.0, kLength, 3), P);
    PhysicalModel m = constant_model(s.mesh(), kA, 0.0, kKappa, 1.0);
    const std::vector<double> beta = experiment_beta(s);
    const auto params = element_parameters(s, m, ModelVariant::exact_1d, beta);
    const Eigen::VectorXd u = solve(assemble(s, m, params, {ModelVariant::exact_1d, 1}));
    // Boundary facet 1 is the outflow end.
    const auto flux = recover_flux(s, u, 1, beta[2], m);
    ASSERT_EQ(flux.size(), 1u);
    const double expected = -kKappa * exact.derivative(kLength);
    EXPECT_LT(relative(flux[0].flux, expected), 1e-8) << "P=" << P;
    EXPECT_GT(relative(flux[0].naive, expected), 0.05) << "P=" << P;
    const double end_value = u[s.mesh().n_nodes() - 1];
    const double correction = (kKappa * beta[2] + kA) * end_value;
    EXPECT_NEAR(flux[0].flux - flux[0].naive, correction, 1e-12 * std::abs(expected));
    m.bcs["right"].kind = BcKind::neumann;
    EXPECT_THROW(recover_flux(s, u, 1, beta[2], m), ConfigError);
  }
}

TEST(InverseConstants, SingleLinearElement) {
  const double h = 0.25;
  const FESpace s = make_space(build_interval_mesh(0.0, h, 1), 1);
  PhysicalModel m = constant_model(s.mesh(), 1.0, 0.0, 1.0);
  m.bcs["left"].kind = BcKind::neumann;
  const InverseConstants ic = inverse_constants(s, m);
  EXPECT_NEAR(ic.T1, 1.0 / h, 1e-12);
  // Right end is outflow: |a.grad w|^2 at the point over its element integral.
  EXPECT_NEAR(ic.T2, 1.0 / h, 1e-12);
  m.bcs["right"].kind = BcKind::neumann;
  EXPECT_THROW(inverse_constants(s, m), ConfigError);
}

TEST(InverseConstants, ScaleWithInverseMeshSize) {
  std::vector<double> t1;
  for (int n : {4, 8}) {
    const FESpace s = make_space(unit_square_mesh(n, n, ElementKind::triangle), 2);
    t1.push_back(inverse_constants(s, constant_model(s.mesh(), 0.0, 0.0, 1.0)).T1);
  }
  EXPECT_NEAR(t1[1] / t1[0], 2.0, 0.2);
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::quad), 2);
  EXPECT_EQ(inverse_constants(s, constant_model(s.mesh(), 0.0, 0.0, 1.0)).T2, 0.0);
}

TEST(GeneralizedEigenvalue, DiagonalExample) {
  Eigen::Matrix3d B = Eigen::Vector3d(1.0, 6.0, 5.0).asDiagonal();
  Eigen::Matrix3d A = Eigen::Vector3d(2.0, 3.0, 0.0).asDiagonal();
  EXPECT_NEAR(max_generalized_eigenvalue(B, A), 2.0, 1e-12);
  EXPECT_THROW(max_generalized_eigenvalue(B, Eigen::Matrix3d::Zero()), SolverError);
}

TEST(OverrefinedReference, RejectsCoarseRefinement) {
  const Mesh coarse = unit_square_mesh(2, 2, ElementKind::triangle);
  auto fine = std::make_shared<const RefinedMesh>(refine_uniform(coarse, 2));
  auto space = std::make_shared<const FESpace>(share(fine->mesh), 1);
  EXPECT_THROW(OverrefinedReference(coarse, fine, space, Eigen::VectorXd::Zero(space->n_dofs())),
               ConfigError);
}

TEST(OverrefinedReference, ReproducesFineField) {
  const Mesh coarse = unit_square_mesh(2, 2, ElementKind::triangle);
  auto fine = std::make_shared<const RefinedMesh>(refine_uniform(coarse, 9));
  auto space = std::make_shared<const FESpace>(share(fine->mesh), 2);
  auto phi = [](const Point& p) { return p.x() * p.x() - p.x() * p.y() + 0.3; };
  const OverrefinedReference ref(coarse, fine, space, space->interpolate(phi));
  double area = 0.0;
  for (int e = 0; e < coarse.n_elements(); ++e)
    for (const ReferenceSample& smp : ref.volume_samples(coarse, e)) {
      area += smp.weight;
      EXPECT_NEAR(smp.value, phi(smp.x), 1e-12);
      EXPECT_NEAR(smp.gradient.x(), 2 * smp.x.x() - smp.x.y(), 1e-10);
    }
  EXPECT_NEAR(area, 1.0, 1e-12);
  const ProjectionResult r = nitsche_project(make_space(coarse, 2), std::vector<double>(8, 80.0), ref,
                                             constant_model(coarse, 1.0, 0.5, 0.01));
  const FESpace cs = make_space(coarse, 2);
  EXPECT_LT((r.coefficients - cs.interpolate(phi)).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
}  // namespace nvms
