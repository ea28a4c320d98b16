// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/params.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nvms/femspace.hpp"

namespace nvms {

namespace {

/// f(Pe) = scale * (A(Pe) - B(Pe) e^Pe) / (C(Pe) - E(Pe) e^Pe) with cubic
/// integer polynomials (coefficients in increasing degree).
struct ExpRatio {
  std::array<int, 4> A, B, C, E;
  double scale;
};

constexpr ExpRatio kXi[3] = {
    {{2, 1, 0, 0}, {2, -1, 0, 0}, {0, -1, 0, 0}, {0, -1, 0, 0}, 1.0},
    {{12, 6, 1, 0}, {12, -6, 1, 0}, {0, -2, -1, 0}, {0, -2, 1, 0}, 1.0 / 36.0},
    {{120, 60, 12, 1}, {120, -60, 12, -1}, {0, -12, -6, -1}, {0, -12, 6, -1}, 1.0 / 900.0},
};

constexpr ExpRatio kEta[3] = {
    {{2, 2, 0, 0}, {2, 0, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}, 1.0},
    {{12, 8, 2, 0}, {12, -4, 0, 0}, {0, 2, 1, 0}, {0, 2, -1, 0}, 1.0 / 6.0},
    {{120, 72, 18, 2}, {120, -48, 6, 0}, {0, 12, 6, 1}, {0, 12, -6, 1}, 1.0 / 30.0},
};

constexpr int kSeriesTerms = 40;
constexpr int kExactTerms = 30;
// Below this Pe the closed forms lose more digits to cancellation than the
// truncated series does.
constexpr double kSeriesThreshold = 2.0;

/// Taylor coefficients of p(Pe) - q(Pe) e^Pe. Coefficients up to kExactTerms
/// are formed from exact integers so the leading cancellations are exact zeros.
std::array<double, kSeriesTerms> series(const std::array<int, 4>& p, const std::array<int, 4>& q) {
  std::array<double, kSeriesTerms> out{};
  __int128 fact = 1;
  double fact_d = 1.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    if (k > 0) {
      fact_d *= k;
      if (k <= kExactTerms) fact *= k;
    }
    if (k <= kExactTerms) {
      // k! * coefficient = k! p_k - sum_m q_m k! / (k - m)!
      __int128 num = k < 4 ? fact * p[k] : 0;
      for (int m = 0; m < 4 && m <= k; ++m) {
        __int128 falling = 1;
        for (int i = 0; i < m; ++i) falling *= (k - i);
        num -= q[m] * falling;
      }
      out[k] = static_cast<double>(num) / fact_d;
    } else {
      double c = 0.0;
      for (int m = 0; m < 4; ++m) {
        double inv = 1.0;
        for (int i = 1; i <= k - m; ++i) inv /= i;
        c -= q[m] * inv;
      }
      out[k] = c;
    }
  }
  return out;
}

struct SeriesPair {
  std::array<double, kSeriesTerms> num, den;
  int lead = 0;
};

SeriesPair make_series(const ExpRatio& r) {
  SeriesPair s{series(r.A, r.B), series(r.C, r.E), 0};
  while (s.lead < kSeriesTerms && s.den[s.lead] == 0.0) ++s.lead;
  return s;
}

double poly(const std::array<int, 4>& c, double x) {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

double evaluate(const ExpRatio& r, const SeriesPair& s, double Pe) {
  if (Pe < kSeriesThreshold) {
    // Both series share the leading zero run; cancel it explicitly.
    double num = 0.0, den = 0.0, pk = 1.0;
    for (int k = s.lead; k < kSeriesTerms; ++k) {
      num += s.num[k] * pk;
      den += s.den[k] * pk;
      pk *= Pe;
    }
    return r.scale * num / den;
  }
  // Multiply through by e^-Pe; for large Pe the e^-Pe terms underflow to the
  // advective asymptote.
  const double em = std::exp(-Pe);
  return r.scale * (poly(r.A, Pe) * em - poly(r.B, Pe)) / (poly(r.C, Pe) * em - poly(r.E, Pe));
}

const SeriesPair& xi_series(int P) {
  static const std::array<SeriesPair, 3> s{make_series(kXi[0]), make_series(kXi[1]),
                                           make_series(kXi[2])};
  return s[P - 1];
}

const SeriesPair& eta_series(int P) {
  static const std::array<SeriesPair, 3> s{make_series(kEta[0]), make_series(kEta[1]),
                                           make_series(kEta[2])};
  return s[P - 1];
}

void check_order(int P) {
  if (P < 1 || P > 3) throw std::invalid_argument("unsupported order " + std::to_string(P));
}

constexpr double kTauScale[3] = {1.0, 12.0, 180.0};

double gamma_scale(int P) {
  switch (P) {
    case 1: return 1.0;
    case 2: return std::sqrt(3.0);
    default: return 2.0 * std::sqrt(5.0);
  }
}

}  // namespace

double peclet(double a_norm, double h, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("peclet: kappa must be positive");
  return a_norm * h / kappa;
}

double xi_exact(int P, double Pe) {
  check_order(P);
  if (!(Pe > 0.0)) throw std::invalid_argument("xi_exact: Pe must be positive");
  return evaluate(kXi[P - 1], xi_series(P), Pe);
}

double eta_exact(int P, double Pe_n) {
  check_order(P);
  if (!(Pe_n > 0.0)) throw std::invalid_argument("eta_exact: Pe_n must be positive");
  return evaluate(kEta[P - 1], eta_series(P), Pe_n);
}

double xi_approx(int P, double Pe) {
  check_order(P);
  if (!(Pe > 0.0)) throw std::invalid_argument("xi_approx: Pe must be positive");
  // Unit h and kappa, |a| = Pe.
  const double t = tau_eff(P, tau_limits(1, Pe, 1.0, 1.0));
  return t / (0.5 / Pe) / kTauScale[P - 1];
}

double eta_approx(int P, double Pe_n) {
  check_order(P);
  if (!(Pe_n > 0.0)) throw std::invalid_argument("eta_approx: Pe_n must be positive");
  const double g = gamma_eff(P, tau_limits(1, Pe_n, 1.0, 1.0), 1.0, 1.0);
  return g / 0.5 / gamma_scale(P);
}

TauLimits tau_limits(int P, double a_norm, double kappa, double h) {
  check_order(P);
  if (!(h > 0.0)) throw std::invalid_argument("tau_limits: h must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("tau_limits: kappa must be positive");
  if (a_norm < 0.0) throw std::invalid_argument("tau_limits: |a| must be nonnegative");
  static constexpr double ca[3] = {2.0, 72.0, 1800.0};
  static constexpr double cd[3] = {12.0, 720.0, 25200.0};
  TauLimits t;
  t.order = P;
  t.tau_a = a_norm > 0.0 ? h / (ca[P - 1] * a_norm) : std::numeric_limits<double>::infinity();
  t.tau_d = h * h / (cd[P - 1] * kappa);
  return t;
}

double tau_eff(int P, const TauLimits& limits) {
  check_order(P);
  if (limits.order != 1) throw std::invalid_argument("tau_eff: expects order-1 limits");
  const double ia2 = 1.0 / (limits.tau_a * limits.tau_a);
  const double id2 = 1.0 / (limits.tau_d * limits.tau_d);
  switch (P) {
    case 1: return 1.0 / std::sqrt(ia2 + id2);
    case 2: return 1.0 / std::sqrt(9.0 * ia2 + 25.0 * id2);
    default: return 1.0 / std::sqrt(25.0 * ia2 + (1225.0 / 9.0) * id2);
  }
}

double gamma_eff(int P, const TauLimits& limits, double kappa, double c_s) {
  check_order(P);
  if (limits.order != 1) throw std::invalid_argument("gamma_eff: expects order-1 limits");
  static constexpr double c1[3] = {3.0, 9.0, 15.0};
  static constexpr double c2[3] = {1.0 / 3.0, 4.0, 15.0};
  const double ia2 = 1.0 / (limits.tau_a * limits.tau_a);
  return c_s * std::sqrt(kappa / (c1[P - 1] * limits.tau_d * ia2 + c2[P - 1] / limits.tau_d));
}

double diffusive_bound_constant(int P) {
  check_order(P);
  static constexpr double cd[3] = {1.0, 1.0 / 5.0, 3.0 / 35.0};
  return cd[P - 1];
}

bool lemma1_check(double tau_eff, double gamma_eff, double kappa, double c_s) {
  return gamma_eff * gamma_eff <= 3.0 * c_s * c_s * kappa * tau_eff * (1.0 + 1e-12);
}

double beta_experiment(int dimension, int P, double h) {
  check_order(P);
  if (!(h > 0.0)) throw std::invalid_argument("beta_experiment: h must be positive");
  if (dimension == 1) {
    static constexpr double c[3] = {2.0, 3.0, 6.0};
    return c[P - 1] / h;
  }
  return P == 1 ? 10.0 / h : 4.0 * P * P / h;
}

double beta_coercive(double T1, double T2, double c_s) { return 4.0 * (T1 + c_s * c_s * T2); }

std::vector<double> beta_choice(const FESpace& space, BetaPolicy policy, std::optional<double> T1,
                                std::optional<double> T2) {
  const Mesh& mesh = space.mesh();
  if (policy == BetaPolicy::coercive && (!T1 || !T2))
    throw std::invalid_argument("beta_choice: coercive policy needs T1 and T2");
  std::vector<double> beta(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    if (policy == BetaPolicy::experiment) {
      beta[e] = beta_experiment(mesh.dimension(), space.order(), g.h);
    } else {
      double c_s = 0.0;
      for (const auto& f : g.facets) c_s = std::max(c_s, f.c_s);
      beta[e] = beta_coercive(*T1, *T2, c_s);
    }
  }
  return beta;
}

}  // namespace nvms
