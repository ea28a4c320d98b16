// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

namespace nvms {

class FESpace;

/// Element Peclet number |a| h / kappa.
double peclet(double a_norm, double h, double kappa);

/// Exact 1D upwind function: tau_P = h / (2|a|) * xi_P(Pe).
double xi_exact(int P, double Pe);
/// Exact 1D boundary function: gamma_P = h / 2 * eta_P(Pe_n).
double eta_exact(int P, double Pe_n);

/// Harmonic-mean approximations implied by tau_eff and gamma_eff (c_s = 1),
/// normalized like xi_exact / eta_exact.
double xi_approx(int P, double Pe);
double eta_approx(int P, double Pe_n);

struct TauLimits {
  /// Advective limit; +inf when a = 0.
  double tau_a = 0.0;
  /// Diffusive limit.
  double tau_d = 0.0;
  int order = 1;
};

/// tau_{P,a} = h / (c_a |a|), tau_{P,d} = h^2 / (c_d kappa) with
/// c_a in {2, 72, 1800} and c_d in {12, 720, 25200}.
TauLimits tau_limits(int P, double a_norm, double kappa, double h);

/// Effective volumetric parameter. `limits` must be the order-1 limits.
double tau_eff(int P, const TauLimits& limits);

/// Effective boundary parameter. `limits` must be the order-1 limits.
double gamma_eff(int P, const TauLimits& limits, double kappa, double c_s);

/// Bound constant in tau_eff <= C_d tau_{1,d}: 1, 1/5, 3/35.
double diffusive_bound_constant(int P);

/// gamma_eff^2 <= 3 c_s^2 kappa tau_eff, with relative slack 1e-12.
bool lemma1_check(double tau_eff, double gamma_eff, double kappa, double c_s);

enum class BetaPolicy { experiment, coercive };

/// Penalty used in the numerical experiments: 1D 2/h, 3/h, 6/h for P = 1, 2, 3;
/// 2D 10/h for P = 1 and 4 P^2 / h otherwise.
double beta_experiment(int dimension, int P, double h);

/// 4 (T1 + c_s^2 T2).
double beta_coercive(double T1, double T2, double c_s);

/// Per-element penalty. The coercive policy uses the largest facet c_s of
/// each element and throws std::invalid_argument when T1 or T2 is missing.
std::vector<double> beta_choice(const FESpace& space, BetaPolicy policy,
                                std::optional<double> T1 = std::nullopt,
                                std::optional<double> T2 = std::nullopt);

}  // namespace nvms
