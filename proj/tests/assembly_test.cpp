// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nvms/assembly.hpp"
#include "nvms/bench.hpp"
#include "nvms/errors.hpp"
#include "nvms/meshgen.hpp"
#include "nvms/params.hpp"
#include "nvms/projector.hpp"
#include "nvms/solver.hpp"
#include "test_support.hpp"

namespace nvms {
namespace {

using testing::constant_model;
using testing::dense;
using testing::share;

std::vector<ElementParams> params_for(const FESpace& s, const PhysicalModel& m, ModelVariant v,
                                      double beta_value = 0.0) {
  std::vector<double> beta = beta_choice(s, BetaPolicy::experiment);
  if (beta_value > 0.0) beta.assign(beta.size(), beta_value);
  return element_parameters(s, m, v, beta);
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = g(rng);
  return x;
}

double quad_form(const SparseMatrix& A, const Eigen::VectorXd& x) { return x.dot(A * x); }

TEST(Advection, ZeroFieldGivesZeroMatrix) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::triangle, 0.2), 2);
  const PhysicalModel m = constant_model(s.mesh(), 0.0, 0.0, 0.1);
  EXPECT_EQ(dense(assemble_advection(s, m)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Advection, SingleLinearElementByHand) {
  const FESpace s = make_space(build_interval_mesh(0.0, 1.0, 1), 1);
  const Eigen::MatrixXd A = dense(assemble_advection(s, constant_model(s.mesh(), 1.0, 0.0, 1.0)));
  Eigen::Matrix2d expected;
  expected << 0.5, 0.5, -0.5, 0.5;
  EXPECT_LT((A - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Advection, EnergyIsHalfBoundaryFlux) {
  struct Case {
    Mesh mesh;
    double ax, ay;
  };
  std::vector<Case> cases;
  cases.push_back({build_interval_mesh(0.0, 0.3, 5), 0.8, 0.0});
  cases.push_back({unit_square_mesh(4, 3, ElementKind::triangle, 0.25), 0.6, -0.3});
  cases.push_back({unit_square_mesh(3, 3, ElementKind::quad), -0.2, 0.9});
  for (const Case& c : cases)
    for (int P = 1; P <= 3; ++P) {
      const FESpace s = make_space(c.mesh, P);
      const PhysicalModel m = constant_model(s.mesh(), c.ax, c.ay, 0.01);
      const auto params = params_for(s, m, ModelVariant::classical_vms);
      const SparseMatrix A = assemble_advection(s, m);
      const NormGrams g = norm_grams(s, m, params);
      for (unsigned k = 0; k < 5; ++k) {
        const Eigen::VectorXd x = random_vector(s.n_dofs(), k + 10 * P);
        const double bnd = quad_form(g.boundary_adv, x);
        EXPECT_NEAR(quad_form(A, x), 0.5 * bnd, 1e-11 * (1.0 + bnd));
      }
    }
}

TEST(DiffusionNitsche, IsSymmetric) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::triangle, 0.3), 3);
  const PhysicalModel m = constant_model(s.mesh(), 0.4, 0.2, 0.05);
  const Eigen::MatrixXd D =
      dense(assemble_diffusion_nitsche(s, m, params_for(s, m, ModelVariant::galerkin_nitsche)));
  EXPECT_LT((D - D.transpose()).cwiseAbs().maxCoeff(), 1e-14 * D.cwiseAbs().maxCoeff());
}

TEST(DiffusionNitsche, CoerciveWithTraceConstantPenalty) {
  for (ElementKind kind : {ElementKind::triangle, ElementKind::quad})
    for (int P = 1; P <= 3; ++P) {
      const FESpace s = make_space(unit_square_mesh(3, 3, kind, kind == ElementKind::quad ? 0.1 : 0.3), P);
      const PhysicalModel m = constant_model(s.mesh(), 0.0, 0.0, 0.05);
      const InverseConstants ic = inverse_constants(s, m);
      const double beta = 4.0 * ic.T1;
      const auto params = params_for(s, m, ModelVariant::galerkin_nitsche, beta);
      const SparseMatrix D = assemble_diffusion_nitsche(s, m, params);
      const NormGrams g = norm_grams(s, m, params);
      for (unsigned k = 0; k < 20; ++k) {
        const Eigen::VectorXd x = random_vector(s.n_dofs(), k);
        const double lower = 0.5 * quad_form(g.stiffness, x) + 0.5 * quad_form(g.penalty, x);
        EXPECT_GE(quad_form(D, x), lower * (1.0 - 1e-10)) << "P=" << P;
      }
    }
  const FESpace s = make_space(build_interval_mesh(0.0, 1.0, 2), 1);
  const PhysicalModel m = constant_model(s.mesh(), 0.0, 0.0, 1.0);
  const auto params = element_parameters(s, m, ModelVariant::galerkin_nitsche, {0.0, 0.0});
  EXPECT_THROW(assemble_diffusion_nitsche(s, m, params), ConfigError);
}

/// Solves with the augmented variant and compares against `exact` at the dofs.
double patch_error(const FESpace& s, const PhysicalModel& m, const ScalarFn& exact) {
  const auto params = params_for(s, m, ModelVariant::augmented_vms);
  const DiscreteSystem sys = assemble(s, m, params, {ModelVariant::augmented_vms, 1});
  const Eigen::VectorXd u = solve(sys);
  const Eigen::VectorXd ref = s.interpolate(exact);
  return (u - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff());
}

TEST(PatchTest, PureDiffusionLinear) {
  const FESpace s = make_space(unit_square_mesh(4, 4, ElementKind::triangle, 0.3), 1);
  PhysicalModel m = constant_model(s.mesh(), 0.0, 0.0, 0.7);
  auto phi = [](const Point& x) { return 1.0 + 2.0 * x.x() - 3.0 * x.y(); };
  for (auto& [tag, bc] : m.bcs) bc.value = phi;
  EXPECT_LT(patch_error(s, m, phi), 1e-12);
}

/// Manufactured polynomial of degree P with its source for constant a, kappa.
struct Manufactured {
  ScalarFn phi;
  ScalarFn f;
};

Manufactured manufactured(int P, double ax, double ay, double kappa) {
  // phi = 0.5 + x - 0.7 y + c2 (x^2 - x y) + c3 (x^3 - 2 x y^2)
  const double c2 = P >= 2 ? 1.3 : 0.0, c3 = P >= 3 ? -0.8 : 0.0;
  Manufactured out;
  out.phi = [=](const Point& p) {
    const double x = p.x(), y = p.y();
    return 0.5 + x - 0.7 * y + c2 * (x * x - x * y) + c3 * (x * x * x - 2 * x * y * y);
  };
  out.f = [=](const Point& p) {
    const double x = p.x(), y = p.y();
    const double gx = 1.0 + c2 * (2 * x - y) + c3 * (3 * x * x - 2 * y * y);
    const double gy = -0.7 - c2 * x - 4 * c3 * x * y;
    const double lap = 2 * c2 + c3 * (6 * x - 4 * x);
    return ax * gx + ay * gy - kappa * lap;
  };
  return out;
}

Manufactured manufactured_1d(int P, double a, double kappa) {
  const double c2 = P >= 2 ? 1.3 : 0.0, c3 = P >= 3 ? -0.8 : 0.0;
  Manufactured out;
  out.phi = [=](const Point& p) {
    const double x = p.x();
    return 0.5 + x + c2 * x * x + c3 * x * x * x;
  };
  out.f = [=](const Point& p) {
    const double x = p.x();
    return a * (1.0 + 2 * c2 * x + 3 * c3 * x * x) - kappa * (2 * c2 + 6 * c3 * x);
  };
  return out;
}

TEST(PatchTest, AugmentedReproducesDegreePPolynomials) {
  for (int P = 1; P <= 3; ++P) {
    {
      const FESpace s = make_space(build_interval_mesh(0.0, 0.3, 4), P);
      const Manufactured mf = manufactured_1d(P, 0.8, 0.02);
      PhysicalModel m = constant_model(s.mesh(), 0.8, 0.0, 0.02);
      m.f = mf.f;
      for (auto& [tag, bc] : m.bcs) bc.value = mf.phi;
      EXPECT_LT(patch_error(s, m, mf.phi), 1e-10) << "1D P=" << P;
    }
    for (ElementKind kind : {ElementKind::triangle, ElementKind::quad}) {
      const double perturb = kind == ElementKind::quad ? 0.0 : 0.3;
      const FESpace s = make_space(unit_square_mesh(4, 3, kind, perturb), P);
      const Manufactured mf = manufactured(P, 0.6, 0.35, 0.01);
      PhysicalModel m = constant_model(s.mesh(), 0.6, 0.35, 0.01);
      m.f = mf.f;
      for (auto& [tag, bc] : m.bcs) bc.value = mf.phi;
      EXPECT_LT(patch_error(s, m, mf.phi), 1e-10) << "kind " << static_cast<int>(kind) << " P=" << P;
      // Outflow Neumann side carrying the exact flux.
      m.bcs["top"] = {BcKind::neumann, [&](const Point& p) {
                        const double e = 1e-6;
                        return 0.01 * (mf.phi(p + Point(0, e)) - mf.phi(p - Point(0, e))) / (2 * e);
                      }};
      EXPECT_LT(patch_error(s, m, mf.phi), 1e-7) << "Neumann kind " << static_cast<int>(kind);
    }
  }
}

TEST(VmsVolume, ZeroTauContributesNothing) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::triangle, 0.2), 2);
  const PhysicalModel m = constant_model(s.mesh(), 0.5, 0.5, 0.01, 1.0);
  const auto params = params_for(s, m, ModelVariant::galerkin_nitsche);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s.n_dofs());
  EXPECT_EQ(dense(assemble_vms_volume(s, m, params, &rhs)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rhs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(VmsVolume, LinearTrianglesMatchStreamlineGram) {
  const FESpace s = make_space(unit_square_mesh(4, 4, ElementKind::triangle, 0.3), 1);
  const PhysicalModel m = constant_model(s.mesh(), 0.7, -0.4, 0.02);
  const auto params = params_for(s, m, ModelVariant::classical_vms);
  const Eigen::MatrixXd V = dense(assemble_vms_volume(s, m, params));
  const Eigen::MatrixXd G = dense(norm_grams(s, m, params).streamline);
  EXPECT_LT((V - G).cwiseAbs().maxCoeff(), 1e-13 * G.cwiseAbs().maxCoeff());
}

TEST(VmsBoundary, InflowOnlyDirichletIsZero) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::quad), 2);
  PhysicalModel m = constant_model(s.mesh(), 1.0, 0.0, 0.01);
  m.bcs["right"].kind = BcKind::neumann;
  m.bcs["top"].kind = BcKind::neumann;
  m.bcs["bottom"].kind = BcKind::neumann;
  const auto params = params_for(s, m, ModelVariant::augmented_vms);
  EXPECT_EQ(dense(assemble_vms_boundary(s, m, params)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(VmsBoundary, ZeroGammaMakesAugmentedClassical) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::triangle, 0.2), 2);
  const PhysicalModel m = constant_model(s.mesh(), 0.5, 0.3, 0.01, 1.0);
  auto params = params_for(s, m, ModelVariant::augmented_vms);
  for (auto& p : params) std::fill(p.gamma.begin(), p.gamma.end(), 0.0);
  const DiscreteSystem aug = assemble(s, m, params, {ModelVariant::augmented_vms, 1});
  const DiscreteSystem cls = assemble(s, m, params, {ModelVariant::classical_vms, 1});
  EXPECT_EQ(dense(aug.matrix), dense(cls.matrix));
  EXPECT_EQ(aug.rhs, cls.rhs);
}

TEST(VmsBoundary, OutflowEntriesByHand) {
  const double a = 0.8, kappa = 0.02, h = 0.1;
  const FESpace s = make_space(build_interval_mesh(0.0, 0.3, 3), 1);
  PhysicalModel m = constant_model(s.mesh(), a, 0.0, kappa);
  m.bcs["right"].value = constant_field(2.0);
  const auto params = params_for(s, m, ModelVariant::augmented_vms);
  const double gamma = params[2].gamma[1];
  EXPECT_GT(gamma, 0.0);
  EXPECT_EQ(params[0].gamma[0], gamma_eff(1, tau_limits(1, a, kappa, h), kappa, 1.0));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4);
  const Eigen::MatrixXd M = dense(assemble_vms_boundary(s, m, params, &rhs));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected(2, 3) = -a * gamma / h;
  expected(3, 3) = a * gamma / h;
  EXPECT_LT((M - expected).cwiseAbs().maxCoeff(), 1e-12 * a * gamma / h);
  EXPECT_NEAR(rhs[2], -2.0 * a * gamma / h, 1e-12);
  EXPECT_NEAR(rhs[3], 2.0 * a * gamma / h, 1e-12);
}

TEST(Rhs, GalerkinNitscheVectorByHand) {
  const FESpace s = make_space(build_interval_mesh(0.0, 0.3, 3), 1);
  PhysicalModel m = constant_model(s.mesh(), 0.8, 0.0, 0.02, 1.0);
  const auto params = element_parameters(s, m, ModelVariant::galerkin_nitsche, {20.0, 20.0, 20.0});
  Eigen::Vector4d expected(0.05, 0.1, 0.1, 0.05);
  EXPECT_LT((assemble_rhs(s, m, params) - expected).cwiseAbs().maxCoeff(), 1e-14);
  m.bcs["left"].value = constant_field(1.0);
  m.bcs["right"].value = constant_field(2.0);
  expected << 1.05, 0.3, 0.5, 0.45;
  EXPECT_LT((assemble_rhs(s, m, params) - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Solver, SingularPureNeumannThrows) {
  const FESpace s = make_space(build_interval_mesh(0.0, 1.0, 4), 2);
  const PhysicalModel m = constant_model(s.mesh(), 0.0, 0.0, 1.0, 0.0, BcKind::neumann);
  const auto params = params_for(s, m, ModelVariant::galerkin_nitsche);
  EXPECT_THROW(solve(assemble(s, m, params, {ModelVariant::galerkin_nitsche, 1})), SolverError);
}

TEST(Solver, IdentityAndResidual) {
  SparseMatrix I(5, 5);
  I.setIdentity();
  const Eigen::VectorXd b = random_vector(5, 1);
  SolveReport report;
  EXPECT_EQ(solve(I, b, &report), b);
  EXPECT_LE(report.residual, 1e-15);

  const FESpace s = make_space(circular_hole_mesh(0.15), 2);
  const PhysicalModel m = constant_model(s.mesh(), 1.0, 0.0, 0.01, 1.0);
  const DiscreteSystem sys =
      assemble(s, m, params_for(s, m, ModelVariant::augmented_vms), {ModelVariant::augmented_vms, 1});
  solve(sys, &report);
  EXPECT_LE(report.residual, 1e-10);
  EXPECT_GT(report.condition_estimate, 1.0);
}

TEST(Assembly, ThreadCountDoesNotChangeResult) {
  const FESpace s = make_space(diamond_hole_mesh(0.15), 2);
  const PhysicalModel m = constant_model(s.mesh(), 1.0, 0.3, 0.005, 1.0);
  const auto params = params_for(s, m, ModelVariant::augmented_vms);
  const DiscreteSystem one = assemble(s, m, params, {ModelVariant::augmented_vms, 1});
  const DiscreteSystem three = assemble(s, m, params, {ModelVariant::augmented_vms, 3});
  EXPECT_EQ(dense(one.matrix), dense(three.matrix));
  EXPECT_EQ(one.rhs, three.rhs);
}

TEST(Assembly, VariantsDifferOnlyByStabilization) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::triangle, 0.2), 2);
  const PhysicalModel m = constant_model(s.mesh(), 0.8, 0.4, 0.01, 1.0);
  const auto params = params_for(s, m, ModelVariant::augmented_vms);
  const DiscreteSystem gal = assemble(s, m, params, {ModelVariant::galerkin_nitsche, 1});
  const DiscreteSystem cls = assemble(s, m, params, {ModelVariant::classical_vms, 1});
  const DiscreteSystem aug = assemble(s, m, params, {ModelVariant::augmented_vms, 1});
  const Eigen::MatrixXd vol = dense(assemble_vms_volume(s, m, params));
  const Eigen::MatrixXd bnd = dense(assemble_vms_boundary(s, m, params));
  EXPECT_LT((dense(cls.matrix) - dense(gal.matrix) - vol).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((dense(aug.matrix) - dense(cls.matrix) - bnd).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_GT(bnd.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, InterpolantDefectConverges) {
  // A^{-1} (A I phi - b) is the gap between interpolant and discrete solution.
  for (int P = 1; P <= 2; ++P) {
    std::vector<double> res;
    for (int n : {4, 8}) {
      const FESpace s = make_space(unit_square_mesh(n, n, ElementKind::triangle), P);
      PhysicalModel m = constant_model(s.mesh(), 0.6, 0.3, 0.05);
      auto phi = [](const Point& p) { return std::sin(2 * p.x()) * std::cos(p.y()); };
      m.f = [](const Point& p) {
        const double sx = std::sin(2 * p.x()), cx = std::cos(2 * p.x());
        const double sy = std::sin(p.y()), cy = std::cos(p.y());
        return 0.6 * 2 * cx * cy - 0.3 * sx * sy + 0.05 * 5 * sx * cy;
      };
      for (auto& [tag, bc] : m.bcs) bc.value = phi;
      const auto params = params_for(s, m, ModelVariant::augmented_vms);
      const DiscreteSystem sys = assemble(s, m, params, {ModelVariant::augmented_vms, 1});
      const Eigen::VectorXd x = s.interpolate(phi);
      const Eigen::VectorXd r = sys.matrix * x - sys.rhs;
      const double u = solve(sys).cwiseAbs().maxCoeff();
      res.push_back((solve(sys.matrix, r)).cwiseAbs().maxCoeff() / u);
    }
    EXPECT_GT(std::log2(res[0] / res[1]), P - 0.3) << "P=" << P;
  }
}

TEST(Assembly, CoercivePenaltySpotCheck) {
  const FESpace s = make_space(unit_square_mesh(3, 3, ElementKind::triangle, 0.2), 2);
  const PhysicalModel m = constant_model(s.mesh(), 1.0, 0.5, 0.01);
  const InverseConstants ic = inverse_constants(s, m);
  const std::vector<double> beta = beta_choice(s, BetaPolicy::coercive, ic.T1, ic.T2);
  for (double b : beta) EXPECT_GE(b, 4.0 * ic.T1);
  const auto params = element_parameters(s, m, ModelVariant::augmented_vms, beta);
  const DiscreteSystem sys = assemble(s, m, params, {ModelVariant::augmented_vms, 1});
  for (unsigned k = 0; k < 20; ++k) {
    const Eigen::VectorXd x = random_vector(s.n_dofs(), k);
    EXPECT_GT(quad_form(sys.matrix, x), 0.0);
  }
}

TEST(ExactModel, NodallyExactInOneDimension) {
  const double a = 0.8, kappa = 0.02;
  for (int P = 1; P <= 3; ++P) {
    std::vector<double> f_coeffs{1.0, -2.0, 5.0};
    f_coeffs.resize(P);
    const FESpace s = make_space(build_interval_mesh(0.0, 0.3, 3), P);
    PhysicalModel m = constant_model(s.mesh(), a, 0.0, kappa);
    m.f = [f_coeffs](const Point& p) {
      double v = 0.0;
      for (std::size_t k = f_coeffs.size(); k-- > 0;) v = v * p.x() + f_coeffs[k];
      return v;
    };
    m.bcs["left"].value = constant_field(0.4);
    m.bcs["right"].value = constant_field(-0.3);
    const Exact1D exact(a, kappa, f_coeffs, 0.0, 0.3, 0.4, -0.3);
    const auto params = params_for(s, m, ModelVariant::exact_1d);
    const Eigen::VectorXd u = solve(assemble(s, m, params, {ModelVariant::exact_1d, 1}));
    const Eigen::VectorXd uc = solve(assemble(s, m, params, {ModelVariant::classical_vms, 1}));
    double scale = 0.0, err = 0.0, err_classical = 0.0;
    for (int i = 0; i <= 300; ++i) scale = std::max(scale, std::abs(exact.value(i * 0.001)));
    for (int i = 1; i + 1 < s.mesh().n_nodes(); ++i) {
      const double e = exact.value(s.mesh().node(i).x());
      err = std::max(err, std::abs(u[i] - e));
      err_classical = std::max(err_classical, std::abs(uc[i] - e));
    }
    EXPECT_LE(err, 1e-10 * scale) << "P=" << P;
    EXPECT_GT(err_classical, 1e-6 * scale) << "P=" << P;
  }
  const FESpace s2 = make_space(unit_square_mesh(2, 2, ElementKind::triangle), 1);
  const PhysicalModel m2 = constant_model(s2.mesh(), 1.0, 0.0, 0.1);
  EXPECT_THROW(params_for(s2, m2, ModelVariant::exact_1d), ConfigError);
}

TEST(MatrixMarket, CoordinateFormat) {
  SparseMatrix A(2, 3);
  A.insert(0, 0) = 1.5;
  A.insert(1, 2) = -0.25;
  std::ostringstream out;
  write_matrix_market(out, A);
  EXPECT_EQ(out.str(), "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 1 1.5\n2 3 -0.25\n");
  std::ostringstream vec;
  write_vector_market(vec, Eigen::Vector2d(0.1, 3.0));
  EXPECT_EQ(vec.str(), "%%MatrixMarket matrix array real general\n2 1\n0.10000000000000001\n3\n");
}

TEST(Variants, NamesRoundTrip) {
  for (ModelVariant v : {ModelVariant::galerkin_nitsche, ModelVariant::classical_vms,
                         ModelVariant::augmented_vms, ModelVariant::exact_1d})
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("upwind"), ConfigError);
}

}  // namespace
}  // namespace nvms
