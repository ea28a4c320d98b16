// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nvms {

/// Malformed input: mesh files, run configurations, field expressions.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mesh connectivity violates a structural invariant (dangling node, open or
/// non-manifold boundary, inverted element).
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear system, eigenproblem or quadrature could not be resolved to the
/// requested accuracy.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, double condition_estimate = 0.0)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// A run configuration references unknown tags, keys or values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nvms
