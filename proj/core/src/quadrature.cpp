// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nvms {

namespace {

QuadratureRule compute_gauss_legendre(int n_points) {
  if (n_points < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.degree = 2 * n_points - 1;
  rule.points.resize(n_points, Point::Zero());
  rule.weights.resize(n_points);
  const int n = n_points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x).
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1].
    rule.points[i].x() = 0.5 * (1.0 - x);
    rule.points[n - 1 - i].x() = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule compute_rule(ElementKind kind, int degree);

template <class Key, class Make>
QuadratureRule cached(std::map<Key, QuadratureRule>& cache, const Key& key, Make make) {
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  QuadratureRule rule = make();
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace

QuadratureRule gauss_legendre(int n_points) {
  static std::map<int, QuadratureRule> cache;
  return cached(cache, n_points, [&] { return compute_gauss_legendre(n_points); });
}

QuadratureRule quadrature(ElementKind kind, int degree) {
  if (degree < 0) throw std::invalid_argument("quadrature: negative degree");
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  return cached(cache, std::pair<int, int>(static_cast<int>(kind), degree),
                [&] { return compute_rule(kind, degree); });
}

double reference_measure(ElementKind kind) {
  return kind == ElementKind::triangle ? 0.5 : 1.0;
}

namespace {

QuadratureRule compute_rule(ElementKind kind, int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  switch (kind) {
    case ElementKind::interval: {
      rule = gauss_legendre(degree / 2 + 1);
      rule.degree = degree;
      return rule;
    }
    case ElementKind::quad: {
      const QuadratureRule g = gauss_legendre(degree / 2 + 1);
      for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) {
          rule.points.emplace_back(g.points[i].x(), g.points[j].x());
          rule.weights.push_back(g.weights[i] * g.weights[j]);
        }
      return rule;
    }
    case ElementKind::triangle: {
      // Collapsed tensor rule: (u, v) in [0,1]^2 -> (u, v (1 - u)), Jacobian (1 - u).
      const QuadratureRule g = gauss_legendre((degree + 2) / 2 + 1);
      for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) {
          const double u = g.points[i].x();
          const double v = g.points[j].x();
          rule.points.emplace_back(u, v * (1.0 - u));
          rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
        }
      return rule;
    }
  }
  throw std::invalid_argument("quadrature: unsupported element kind");
}

}  // namespace

}  // namespace nvms
