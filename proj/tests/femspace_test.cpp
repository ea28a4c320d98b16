// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "nvms/femspace.hpp"
#include "nvms/meshgen.hpp"
#include "nvms/quadrature.hpp"
#include "test_support.hpp"

namespace nvms {
namespace {

using testing::data_path;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

/// Exact reference-element integral of x^i y^j.
double monomial_integral(ElementKind kind, int i, int j) {
  switch (kind) {
    case ElementKind::interval: return j == 0 ? 1.0 / (i + 1) : 0.0;
    case ElementKind::quad: return 1.0 / ((i + 1) * (j + 1));
    case ElementKind::triangle: return factorial(i) * factorial(j) / factorial(i + j + 2);
  }
  return 0.0;
}

TEST(Quadrature, IntegratesMonomialsUpToDegree) {
  for (ElementKind kind : {ElementKind::interval, ElementKind::triangle, ElementKind::quad}) {
    for (int degree = 0; degree <= 14; ++degree) {
      const QuadratureRule q = quadrature(kind, degree);
      double wsum = 0.0;
      for (double w : q.weights) {
        EXPECT_GT(w, 0.0);
        wsum += w;
      }
      EXPECT_NEAR(wsum, reference_measure(kind), 1e-14);
      const int jmax = kind == ElementKind::interval ? 0 : degree;
      for (int i = 0; i <= degree; ++i)
        for (int j = 0; j <= jmax; ++j) {
          // Quads are exact in each variable separately; simplices in total degree.
          if (kind != ElementKind::quad && i + j > degree) continue;
          double s = 0.0;
          for (std::size_t k = 0; k < q.size(); ++k)
            s += q.weights[k] * std::pow(q.points[k].x(), i) * std::pow(q.points[k].y(), j);
          EXPECT_NEAR(s, monomial_integral(kind, i, j), 1e-14)
              << "kind " << static_cast<int>(kind) << " degree " << degree << " x^" << i << " y^" << j;
        }
    }
  }
  EXPECT_THROW(quadrature(ElementKind::triangle, -1), std::invalid_argument);
}

TEST(Quadrature, MidpointExamples) {
  const QuadratureRule q = quadrature(ElementKind::interval, 1);
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * q.points[k].x();
  EXPECT_DOUBLE_EQ(s, 0.5);
}

TEST(FESpace, DofCounts) {
  const Mesh line = build_interval_mesh(0.0, 0.3, 3);
  EXPECT_EQ(make_space(line, 1).n_dofs(), 4);
  EXPECT_EQ(make_space(line, 2).n_dofs(), 7);
  EXPECT_EQ(make_space(line, 3).n_dofs(), 10);
  const Mesh two = load_mesh(data_path("two_triangles.mesh"));
  EXPECT_EQ(make_space(two, 2).n_dofs(), 9);
  EXPECT_EQ(make_space(two, 3).n_dofs(), 16);
  const Mesh quads = unit_square_mesh(2, 3, ElementKind::quad);
  // Q_P nodes on a (2P+1) x (3P+1) lattice.
  EXPECT_EQ(make_space(quads, 2).n_dofs(), 5 * 7);
  EXPECT_EQ(make_space(quads, 3).n_dofs(), 7 * 10);
  EXPECT_THROW(make_space(line, 4), std::invalid_argument);
  EXPECT_THROW(make_space(line, 0), std::invalid_argument);
}

TEST(FESpace, VertexDofsComeFirst) {
  const Mesh m = unit_square_mesh(2, 2, ElementKind::triangle, 0.2);
  const FESpace s = make_space(m, 3);
  for (int i = 0; i < m.n_nodes(); ++i) EXPECT_EQ(s.dof_points()[i], m.node(i));
  for (int e = 0; e < m.n_elements(); ++e)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s.element_dofs(e)[i], m.element(e).nodes[i]);
}

TEST(EvalBasis, LinearIntervalMidpoint) {
  const FESpace s = make_space(build_interval_mesh(0.0, 2.0, 1), 1);
  const BasisEval b = eval_basis(s, 0, Point(0.5, 0.0));
  EXPECT_DOUBLE_EQ(b.values[0], 0.5);
  EXPECT_DOUBLE_EQ(b.values[1], 0.5);
  EXPECT_DOUBLE_EQ(b.gradients(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(b.det_j, 2.0);
}

TEST(EvalBasis, LinearTriangleHasZeroLaplacian) {
  const FESpace s = make_space(unit_square_mesh(2, 2, ElementKind::triangle, 0.3), 1);
  for (int e = 0; e < s.mesh().n_elements(); ++e) {
    const BasisEval b = eval_basis(s, e, Point(0.2, 0.3));
    EXPECT_LT(b.laplacians.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(EvalBasis, QuadraticBubbleLaplacian) {
  // Middle node basis on [0, h] is 4 x (h - x) / h^2.
  const double h = 0.37;
  const FESpace s = make_space(build_interval_mesh(0.0, h, 1), 2);
  const BasisEval b = eval_basis(s, 0, Point(0.3, 0.0));
  EXPECT_NEAR(b.laplacians[2], -8.0 / (h * h), 1e-10);
  EXPECT_NEAR(b.values[2], 4.0 * 0.3 * 0.7, 1e-14);
}

class BasisByKindOrder : public ::testing::TestWithParam<std::tuple<ElementKind, int>> {};

TEST_P(BasisByKindOrder, PartitionOfUnity) {
  const auto [kind, P] = GetParam();
  const Mesh m = kind == ElementKind::interval ? build_interval_mesh(0.0, 1.0, 3)
                                               : unit_square_mesh(2, 2, kind, 0.3);
  const FESpace s = make_space(m, P);
  std::mt19937 rng(P);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    Point ref(u(rng), kind == ElementKind::interval ? 0.0 : u(rng));
    if (kind == ElementKind::triangle && ref.sum() > 1.0) ref = Point(1.0 - ref.x(), 1.0 - ref.y());
    const BasisEval b = eval_basis(s, n % m.n_elements(), ref);
    EXPECT_NEAR(b.values.sum(), 1.0, 1e-12);
    EXPECT_LT(b.gradients.colwise().sum().norm(), 1e-9);
    EXPECT_NEAR(b.laplacians.sum(), 0.0, 1e-7);
  }
}

TEST_P(BasisByKindOrder, InterpolationReproducesPolynomials) {
  const auto [kind, P] = GetParam();
  // Affine geometry keeps physical polynomials inside mapped Q_P spaces.
  const double perturb = kind == ElementKind::quad ? 0.0 : 0.3;
  const Mesh m = kind == ElementKind::interval ? build_interval_mesh(-0.5, 1.0, 4)
                                               : unit_square_mesh(3, 2, kind, perturb);
  const FESpace s = make_space(m, P);
  const int dim = m.dimension();
  auto p = [P, dim](const Point& x) {
    const double y = dim == 2 ? x.y() : 0.0;
    return 0.3 - x.x() + 2.0 * y + (P >= 2 ? 1.5 * x.x() * y - x.x() * x.x() : 0.0) +
           (P >= 3 ? 0.7 * x.x() * x.x() * x.x() - y * y * x.x() : 0.0);
  };
  auto lap = [P](const Point& x) {
    return (P >= 2 ? -2.0 : 0.0) + (P >= 3 ? 4.2 * x.x() - 2.0 * x.x() : 0.0);
  };
  auto lap1d = [P](const Point& x) { return (P >= 2 ? -2.0 : 0.0) + (P >= 3 ? 4.2 * x.x() : 0.0); };
  const Eigen::VectorXd c = s.interpolate(p);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const Point x(dim == 1 ? -0.5 + 1.5 * u(rng) : u(rng), dim == 1 ? 0.0 : u(rng));
    const auto [e, ref] = locate(m, x);
    const FieldSample f = eval_field(s, c, e, ref);
    EXPECT_NEAR(f.value, p(x), 1e-12);
    const BasisEval b = eval_basis(s, e, ref);
    const double l = b.laplacians.dot(Eigen::VectorXd(c(std::vector<int>(
        s.element_dofs(e).begin(), s.element_dofs(e).end()))));
    EXPECT_NEAR(l, dim == 1 ? lap1d(x) : lap(x), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, BasisByKindOrder,
                         ::testing::Combine(::testing::Values(ElementKind::interval,
                                                              ElementKind::triangle,
                                                              ElementKind::quad),
                                            ::testing::Values(1, 2, 3)));

TEST(FESpace, SharedFacetTracesAgree) {
  for (ElementKind kind : {ElementKind::triangle, ElementKind::quad}) {
    const Mesh m = unit_square_mesh(3, 3, kind, 0.25);
    for (int P = 1; P <= 3; ++P) {
      const FESpace s = make_space(m, P);
      std::mt19937 rng(P);
      std::normal_distribution<double> g;
      Eigen::VectorXd c(s.n_dofs());
      for (int i = 0; i < s.n_dofs(); ++i) c[i] = g(rng);
      // Key: ordered global vertex pair; value: traces at s = 0.1, 0.35, 0.8 along it.
      std::map<std::pair<int, int>, std::vector<double>> seen;
      int compared = 0;
      for (int e = 0; e < m.n_elements(); ++e) {
        const Element& el = m.element(e);
        for (int f = 0; f < facet_count(kind); ++f) {
          const auto lv = facet_vertices(kind, f);
          const int v0 = el.nodes[lv[0]], v1 = el.nodes[lv[1]];
          std::vector<double> tr;
          for (double t : {0.1, 0.35, 0.8}) {
            const double param = v0 < v1 ? t : 1.0 - t;
            tr.push_back(eval_field(s, c, e, facet_reference_point(kind, f, param)).value);
          }
          const auto key = std::minmax(v0, v1);
          if (auto it = seen.find(key); it != seen.end()) {
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(tr[k], it->second[k], 1e-12);
            ++compared;
          } else {
            seen[key] = tr;
          }
        }
      }
      EXPECT_GT(compared, 0);
    }
  }
}

TEST(EvaluateSolution, NodalValuesAndOutsidePoints) {
  const Mesh m = load_mesh(data_path("two_triangles.mesh"));
  const FESpace s = make_space(m, 3);
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(s.n_dofs(), -1.0, 2.0);
  const auto samples = evaluate_solution(s, c, s.dof_points());
  for (int i = 0; i < s.n_dofs(); ++i) EXPECT_NEAR(samples[i].value, c[i], 1e-12);
  const std::vector<Point> outside{Point(1.5, 0.5)};
  EXPECT_THROW(evaluate_solution(s, c, outside), std::out_of_range);
}

TEST(EvaluateSolution, CutLineSamplesAreFinite) {
  const Mesh m = circular_hole_mesh(0.15);
  const FESpace s = make_space(m, 2);
  const Eigen::VectorXd c = s.interpolate([](const Point& x) { return std::sin(3 * x.x()) * x.y(); });
  std::vector<Point> line;
  for (int i = 0; i <= 40; ++i) line.emplace_back(i / 40.0, 0.1);
  for (const FieldSample& f : evaluate_solution(s, c, line)) EXPECT_TRUE(std::isfinite(f.value));
}

}  // namespace
}  // namespace nvms
