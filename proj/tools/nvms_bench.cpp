// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

// nvms-bench: runs configured experiments and writes CSV results.
//
// Exit codes: 0 success, 2 configuration error, 3 solver error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvms/bench.hpp"
#include "nvms/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

void emit(const nvms::Table& table, const std::string& path) {
  if (path.empty() || path == "-") {
    nvms::write_csv(std::cout, table);
  } else {
    nvms::write_csv_file(path, table);
    std::cerr << "wrote " << path << "\n";
  }
}

nvms::RunConfig load(const std::string& path, const std::string& out_dir, bool dump_matrix) {
  nvms::RunConfig c = nvms::load_run_config(path);
  if (!out_dir.empty()) c.output.dir = out_dir;
  if (dump_matrix) c.output.matrix_market = true;
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Nitsche / variational multiscale advection-diffusion experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, out_file;
  bool dump_matrix = false;
  int levels = 3;
  double pe_min = 1e-4, pe_max = 1e4;
  int count = 81;
  std::vector<int> orders{1, 2, 3};
  int greens_points = 20, greens_subdivisions = 1;

  auto* solve = app.add_subcommand("solve", "Solve all configured variants and report errors");
  solve->add_option("config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--out-dir", out_dir, "Output directory (overrides [output] dir)");
  solve->add_flag("--dump-matrix", dump_matrix, "Write MatrixMarket systems");

  auto* project = app.add_subcommand("project", "Nitsche and H1_0 projections of the reference");
  project->add_option("config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  project->add_option("-o,--output", out_file, "CSV path ('-' for stdout)");

  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over mesh levels");
  sweep->add_option("config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--levels", levels, "Number of levels")->check(CLI::Range(2, 12));
  sweep->add_option("-o,--output", out_file, "CSV path ('-' for stdout)");

  auto* greens = app.add_subcommand("greens-table", "Closed-form vs quadrature xi and eta");
  auto* params = app.add_subcommand("param-table", "Exact and approximate xi and eta");
  for (auto* sub : {greens, params}) {
    sub->add_option("--pe-min", pe_min, "Smallest Peclet number")->check(CLI::PositiveNumber);
    sub->add_option("--pe-max", pe_max, "Largest Peclet number")->check(CLI::PositiveNumber);
    sub->add_option("--count", count, "Grid points")->check(CLI::Range(1, 100000));
    sub->add_option("--orders", orders, "Polynomial orders")->delimiter(',')->check(CLI::Range(1, 3));
    sub->add_option("-o,--output", out_file, "CSV path ('-' for stdout)");
  }
  greens->add_option("--points", greens_points, "Gauss points per panel")->check(CLI::Range(2, 64));
  greens->add_option("--subdivisions", greens_subdivisions, "Panel subdivisions")
      ->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  if (*solve) {
    const nvms::RunConfig c = load(config_path, out_dir, dump_matrix);
    const nvms::CaseResult r = nvms::run_case(c);
    nvms::write_csv(std::cout, nvms::error_table(r));
    for (const std::string& p : nvms::write_case_outputs(r, c)) std::cerr << "wrote " << p << "\n";
  } else if (*project) {
    nvms::RunConfig c = load(config_path, "", false);
    c.variants.clear();
    const nvms::CaseResult r = nvms::run_case(c);
    const nvms::ProjectionResult h10 = nvms::h10_project(*r.space, *r.reference);
    nvms::Table t;
    t.header = {"dof", "x", "y", "nitsche", "h10"};
    for (int d = 0; d < r.space->n_dofs(); ++d) {
      const nvms::Point& x = r.space->dof_points()[d];
      t.add({static_cast<long long>(d), x.x(), x.y(), r.projection.coefficients[d],
             h10.coefficients[d]});
    }
    std::cerr << "projection condition estimate "
              << nvms::format_number(r.projection.condition_estimate)
              << (r.projection.definite ? "" : " (indefinite: stationary point)") << "\n";
    emit(t, out_file);
  } else if (*sweep) {
    const nvms::RunConfig c = load(config_path, "", false);
    const nvms::Table t = nvms::convergence_sweep(c, levels);
    emit(t, out_file);
    if (!t.rows.empty() && std::get<std::string>(t.rows.back()[3]) == "failed") return kSolverError;
  } else {
    if (pe_max < pe_min) throw nvms::ConfigError("--pe-max must not be below --pe-min");
    const std::vector<double> pe = nvms::log_grid(pe_min, pe_max, count);
    if (*greens)
      emit(nvms::greens_table(pe, orders, {greens_points, greens_subdivisions}), out_file);
    else
      emit(nvms::param_table(pe, orders), out_file);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const nvms::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const nvms::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nvms::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nvms::TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
