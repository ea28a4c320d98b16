// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "nvms/assembly.hpp"
#include "nvms/bench.hpp"
#include "nvms/greens.hpp"
#include "nvms/meshgen.hpp"
#include "nvms/params.hpp"
#include "nvms/projector.hpp"
#include "nvms/quadrature.hpp"
#include "nvms/solver.hpp"

namespace nvms {
namespace {

PhysicalModel hole_model() {
  PhysicalModel m;
  m.a = constant_vector(0.8 / std::sqrt(2.0), 0.8 / std::sqrt(2.0));
  m.kappa = constant_field(0.01);
  m.f = constant_field(0.0);
  m.bcs["outer"] = {BcKind::dirichlet, [](const Point& p) { return p.x() + p.y(); }};
  m.bcs["hole"] = {BcKind::dirichlet, constant_field(0.0)};
  return m;
}

void BM_Quadrature(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(quadrature(ElementKind::triangle, degree));
}
BENCHMARK(BM_Quadrature)->Arg(4)->Arg(12);

void BM_AssembleAugmented(benchmark::State& state) {
  const FESpace space(std::make_shared<const Mesh>(circular_hole_mesh(0.07)),
                      static_cast<int>(state.range(0)));
  const PhysicalModel model = hole_model();
  const auto params = element_parameters(space, model, ModelVariant::augmented_vms,
                                         beta_choice(space, BetaPolicy::experiment));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble(space, model, params, {ModelVariant::augmented_vms, 1}));
  state.counters["dofs"] = space.n_dofs();
}
BENCHMARK(BM_AssembleAugmented)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SolveAugmented(benchmark::State& state) {
  const FESpace space(std::make_shared<const Mesh>(circular_hole_mesh(0.07)),
                      static_cast<int>(state.range(0)));
  const PhysicalModel model = hole_model();
  const auto params = element_parameters(space, model, ModelVariant::augmented_vms,
                                         beta_choice(space, BetaPolicy::experiment));
  const DiscreteSystem sys = assemble(space, model, params, {ModelVariant::augmented_vms, 1});
  for (auto _ : state) benchmark::DoNotOptimize(solve(sys));
}
BENCHMARK(BM_SolveAugmented)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_TauByQuadrature(benchmark::State& state) {
  const int P = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tau_by_quadrature(P, 0.8, 0.02, 0.1));
}
BENCHMARK(BM_TauByQuadrature)->DenseRange(1, 3);

void BM_GammaByQuadrature(benchmark::State& state) {
  const int P = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(gamma_by_quadrature(P, 0.8, 0.02, 0.1, Facet1D::right));
}
BENCHMARK(BM_GammaByQuadrature)->DenseRange(1, 3);

void BM_NitscheProjection1D(benchmark::State& state) {
  const int P = static_cast<int>(state.range(0));
  const FESpace space(std::make_shared<const Mesh>(build_interval_mesh(0.0, 0.3, 30)), P);
  PhysicalModel m;
  m.a = constant_vector(0.8);
  m.kappa = constant_field(0.02);
  m.f = constant_field(1.0);
  m.bcs["left"] = {BcKind::dirichlet, constant_field(0.0)};
  m.bcs["right"] = {BcKind::dirichlet, constant_field(0.0)};
  const AnalyticReference ref = Exact1D(0.8, 0.02, {1.0}, 0.0, 0.3, 0.0, 0.0).reference();
  const std::vector<double> beta = beta_choice(space, BetaPolicy::experiment);
  for (auto _ : state)
    benchmark::DoNotOptimize(nitsche_project(space, beta, ref, m, {.allow_indefinite = true}));
}
BENCHMARK(BM_NitscheProjection1D)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace nvms

BENCHMARK_MAIN();
