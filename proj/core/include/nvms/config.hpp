// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvms/assembly.hpp"
#include "nvms/params.hpp"

namespace nvms {

/// Plain `key = value` text with `[section]` headers and `#` comments. Keys
/// before the first header belong to the section "".
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

struct MeshSource {
  /// interval | unit_square | circular_hole | diamond_hole | file
  std::string generator = "interval";
  double x_left = 0.0;
  double x_right = 0.3;
  int elements = 3;
  int nx = 4;
  int ny = 4;
  ElementKind kind = ElementKind::triangle;
  double perturbation = 0.0;
  double h = 0.1;
  std::string file;
};

struct BcSpec {
  BcKind kind = BcKind::dirichlet;
  std::string value = "0";
};

struct BetaSpec {
  BetaPolicy policy = BetaPolicy::experiment;
  /// When set, beta = factor / h on every element.
  std::optional<double> factor;
};

struct ReferenceSpec {
  /// Element order of the overrefined reference solve.
  int order = 3;
  /// Refinement factor; 0 picks ceil(8 * size ratio).
  int refine = 0;
  /// Optional closed-form reference (value and gradient components).
  std::optional<std::string> value, grad_x, grad_y;
};

struct SweepSpec {
  std::vector<double> h;
  std::vector<int> elements;
  int threads = 1;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix = "nvms";
  int plot_points = 301;
  bool matrix_market = false;
  bool gnuplot = true;
};

/// One experiment. Defaults reproduce the 1D boundary-layer case with f = 1
/// and homogeneous Dirichlet data.
struct RunConfig {
  MeshSource mesh;
  int order = 1;
  std::vector<ModelVariant> variants{ModelVariant::galerkin_nitsche, ModelVariant::classical_vms,
                                     ModelVariant::augmented_vms, ModelVariant::exact_1d};
  double ax = 0.8;
  double ay = 0.0;
  double kappa = 0.02;
  std::string f = "1";
  std::map<std::string, BcSpec> bcs{{"left", {}}, {"right", {}}};
  BetaSpec beta;
  /// Accept the stationary point when the projection functional is indefinite.
  bool allow_indefinite_projection = true;
  ReferenceSpec reference;
  SweepSpec sweep;
  OutputSpec output;
  int threads = 1;
};

/// Builds a RunConfig from a key-value file. Unknown sections or keys, bad
/// numbers and unparsable expressions raise ConfigError.
RunConfig run_config_from(const KeyValueFile& file);
/// Loads a configuration file; a relative mesh.file is taken relative to it.
RunConfig load_run_config(const std::string& path);

/// Physical model with parsed expressions.
PhysicalModel make_model(const RunConfig& config);

}  // namespace nvms
