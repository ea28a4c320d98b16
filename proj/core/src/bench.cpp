// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/bench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

#include <Eigen/LU>

#include "nvms/errors.hpp"
#include "nvms/expression.hpp"
#include "nvms/meshgen.hpp"
#include "nvms/params.hpp"

namespace nvms {

namespace {

double poly_eval(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(k * c[k]);
  return d;
}

std::vector<double> poly_integral(const std::vector<double>& c) {
  std::vector<double> i{0.0};
  for (std::size_t k = 0; k < c.size(); ++k) i.push_back(c[k] / (k + 1.0));
  return i;
}

}  // namespace

Exact1D::Exact1D(double a, double kappa, std::vector<double> f, double x_left, double x_right,
                 double phi_left, double phi_right)
    : a_(a), kappa_(kappa), x_left_(x_left), length_(x_right - x_left) {
  if (!(kappa > 0.0) || !(length_ > 0.0)) throw std::invalid_argument("Exact1D: bad data");
  if (a != 0.0) {
    // q = phi_p' solves a q - kappa q' = f.
    std::vector<double> q(f.size(), 0.0), d = f;
    double scale = 1.0 / a;
    while (!d.empty()) {
      for (std::size_t k = 0; k < d.size(); ++k) q[k] += scale * d[k];
      d = poly_derivative(d);
      scale *= kappa / a;
    }
    particular_ = poly_integral(q);
  } else {
    particular_ = poly_integral(poly_integral(f));
    for (double& c : particular_) c /= -kappa;
  }
  auto hom = [&](double t) {
    if (a_ == 0.0) return t;
    const double r = a_ / kappa_;
    return a_ > 0.0 ? std::exp(r * (t - length_)) : std::exp(r * t);
  };
  const double h0 = hom(0.0), hL = hom(length_);
  const double p0 = poly_eval(particular_, 0.0), pL = poly_eval(particular_, length_);
  c2_ = ((phi_right - pL) - (phi_left - p0)) / (hL - h0);
  c1_ = phi_left - p0 - c2_ * h0;
}

double Exact1D::value(double x) const {
  const double t = x - x_left_;
  double hom = t;
  if (a_ != 0.0) {
    const double r = a_ / kappa_;
    hom = a_ > 0.0 ? std::exp(r * (t - length_)) : std::exp(r * t);
  }
  return poly_eval(particular_, t) + c1_ + c2_ * hom;
}

double Exact1D::derivative(double x) const {
  const double t = x - x_left_;
  double dhom = 1.0;
  if (a_ != 0.0) {
    const double r = a_ / kappa_;
    dhom = r * (a_ > 0.0 ? std::exp(r * (t - length_)) : std::exp(r * t));
  }
  return poly_eval(poly_derivative(particular_), t) + c2_ * dhom;
}

AnalyticReference Exact1D::reference(int degree, int subdivisions) const {
  const Exact1D self = *this;
  return AnalyticReference([self](const Point& p) { return self.value(p.x()); },
                           [self](const Point& p) { return Point(self.derivative(p.x()), 0.0); },
                           degree, subdivisions);
}

std::vector<double> polynomial_coefficients(const ScalarFn& f, double x_left, double x_right,
                                            int max_degree) {
  const double L = x_right - x_left;
  const int n = max_degree + 1;
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / n);
    for (int k = 0; k < n; ++k) V(i, k) = std::pow(s, k);
    y[i] = f(Point(x_left + s * L, 0.0));
  }
  const Eigen::VectorXd c = V.fullPivLu().solve(y);
  double scale = y.cwiseAbs().maxCoeff() + 1.0;
  for (int i = 0; i <= 16; ++i) {
    const double s = i / 16.0;
    double p = 0.0;
    for (int k = n - 1; k >= 0; --k) p = p * s + c[k];
    if (std::abs(p - f(Point(x_left + s * L, 0.0))) > 1e-10 * scale)
      throw ConfigError("source term is not a polynomial of degree <= " +
                        std::to_string(max_degree) + " on the interval");
  }
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = std::abs(c[k]) < 1e-13 * scale ? 0.0 : c[k] / std::pow(L, k);
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

Mesh build_mesh(const MeshSource& s) {
  if (s.generator == "interval") return build_interval_mesh(s.x_left, s.x_right, s.elements);
  if (s.generator == "unit_square") return unit_square_mesh(s.nx, s.ny, s.kind, s.perturbation);
  if (s.generator == "circular_hole") return circular_hole_mesh(s.h);
  if (s.generator == "diamond_hole") return diamond_hole_mesh(s.h);
  if (s.generator == "file") return load_mesh(s.file);
  throw ConfigError("unknown mesh generator '" + s.generator + "'");
}

std::vector<double> beta_for(const FESpace& space, const PhysicalModel& model,
                             const RunConfig& config) {
  if (config.beta.factor) {
    std::vector<double> beta;
    for (int e = 0; e < space.mesh().n_elements(); ++e)
      beta.push_back(*config.beta.factor / space.mesh().element_size(e));
    return beta;
  }
  if (config.beta.policy == BetaPolicy::experiment) return beta_choice(space, BetaPolicy::experiment);
  const InverseConstants ic = inverse_constants(space, model);
  return beta_choice(space, BetaPolicy::coercive, ic.T1, ic.T2);
}

VariantSolve solve_variant(const FESpace& space, const PhysicalModel& model, ModelVariant variant,
                           const std::vector<double>& beta, int threads) {
  VariantSolve out;
  out.variant = variant;
  const auto params = element_parameters(space, model, variant, beta);
  out.system = assemble(space, model, params, {variant, threads});
  out.coefficients = solve(out.system, &out.report);
  return out;
}

double l2_distance(const FESpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                   int degree) {
  double sum = 0.0;
  const Mesh& mesh = space.mesh();
  const Eigen::VectorXd diff = u - v;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadratureRule rule = quadrature(mesh.element(e).kind, degree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = eval_basis(space, e, rule.points[q]);
      double d = 0.0;
      const auto dofs = space.element_dofs(e);
      for (std::size_t i = 0; i < dofs.size(); ++i) d += diff[dofs[i]] * b.values[i];
      sum += rule.weights[q] * b.det_j * d * d;
    }
  }
  return std::sqrt(sum);
}

namespace {

/// L2 errors of several coefficient vectors against one reference, sampling it once.
std::vector<double> l2_errors(const FESpace& space, const std::vector<const Eigen::VectorXd*>& us,
                              const ReferenceField& reference) {
  std::vector<double> sums(us.size(), 0.0);
  const Mesh& mesh = space.mesh();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    for (const ReferenceSample& s : reference.volume_samples(mesh, e)) {
      const BasisEval b = eval_basis(space, e, s.ref);
      for (std::size_t k = 0; k < us.size(); ++k) {
        double v = 0.0;
        for (std::size_t i = 0; i < dofs.size(); ++i) v += (*us[k])[dofs[i]] * b.values[i];
        sums[k] += s.weight * (s.value - v) * (s.value - v);
      }
    }
  }
  for (double& s : sums) s = std::sqrt(s);
  return sums;
}

}  // namespace

double l2_error(const FESpace& space, const Eigen::VectorXd& u, const ReferenceField& reference) {
  return l2_errors(space, {&u}, reference)[0];
}

double boundary_trace_error(const FESpace& space, const Eigen::VectorXd& u,
                            const PhysicalModel& model, int degree) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule rule = facet_quadrature(mesh, degree);
  double sum = 0.0;
  for (const BoundaryFacet& bf : mesh.boundary_facets()) {
    const auto it = model.bcs.find(bf.tag);
    if (it == model.bcs.end()) throw ConfigError("no boundary condition for tag '" + bf.tag + "'");
    if (it->second.kind != BcKind::dirichlet) continue;
    const ElementKind kind = mesh.element(bf.element).kind;
    const double measure = mesh.facet_measure(bf.element, bf.local_facet);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point ref = facet_reference_point(kind, bf.local_facet, rule.points[q].x());
      const FieldSample s = eval_field(space, u, bf.element, ref);
      const double d = s.value - it->second.value(mesh.map_to_physical(bf.element, ref));
      sum += rule.weights[q] * measure * d * d;
    }
  }
  return std::sqrt(sum);
}

std::vector<double> element_error_density(const FESpace& space, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& v, int degree) {
  const Mesh& mesh = space.mesh();
  std::vector<double> out(mesh.n_elements(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadratureRule rule = quadrature(mesh.element(e).kind, degree);
    const auto dofs = space.element_dofs(e);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = eval_basis(space, e, rule.points[q]);
      double d = 0.0;
      for (std::size_t i = 0; i < dofs.size(); ++i) d += (u[dofs[i]] - v[dofs[i]]) * b.values[i];
      sum += rule.weights[q] * b.det_j * d * d;
    }
    out[e] = sum / mesh.element_measure(e);
  }
  return out;
}

namespace {

std::shared_ptr<const ReferenceField> configured_reference(const RunConfig& config) {
  if (!config.reference.value) return nullptr;
  const ScalarFn value = Expression::parse(*config.reference.value).function();
  const ScalarFn gx = Expression::parse(*config.reference.grad_x).function();
  const ScalarFn gy = Expression::parse(config.reference.grad_y.value_or("0")).function();
  return std::make_shared<AnalyticReference>(
      value, [gx, gy](const Point& p) { return Point(gx(p), gy(p)); });
}

void finish_case(CaseResult& r, const RunConfig& config) {
  const FESpace& space = *r.space;
  const int P = space.order();
  r.projection = nitsche_project(space, r.beta, *r.reference, r.model,
                                 {config.allow_indefinite_projection});
  for (ModelVariant v : config.variants)
    r.solves.push_back(solve_variant(space, r.model, v, r.beta, config.threads));
  std::vector<const Eigen::VectorXd*> fields;
  for (const VariantSolve& s : r.solves) fields.push_back(&s.coefficients);
  const std::vector<double> l2 = l2_errors(space, fields, *r.reference);

  const Mesh& mesh = space.mesh();
  std::vector<char> on_boundary(mesh.n_nodes(), 0);
  for (const BoundaryFacet& bf : mesh.boundary_facets()) {
    const Element& el = mesh.element(bf.element);
    for (int lv : facet_vertices(el.kind, bf.local_facet)) {
      if (el.kind == ElementKind::interval && lv != bf.local_facet) continue;
      on_boundary[el.nodes[lv]] = 1;
    }
  }
  for (std::size_t k = 0; k < r.solves.size(); ++k) {
    const VariantSolve& s = r.solves[k];
    ErrorReport rep;
    rep.variant = s.variant;
    rep.l2_reference = l2[k];
    rep.l2_projected = l2_distance(space, s.coefficients, r.projection.coefficients, 2 * P + 2);
    rep.boundary_trace = boundary_trace_error(space, s.coefficients, r.model, 2 * P + 2);
    rep.dofs = space.n_dofs();
    rep.h_max = max_element_size(mesh);
    rep.condition_estimate = s.report.condition_estimate;
    if (mesh.dimension() == 1) {
      rep.nodal_max = 0.0;
      for (int n = 0; n < mesh.n_nodes(); ++n)
        if (!on_boundary[n])
          rep.nodal_max = std::max(
              rep.nodal_max, std::abs(s.coefficients[n] - r.reference->value_at(mesh.node(n)).value));
    }
    r.errors.push_back(rep);
  }
}

}  // namespace

CaseResult run_case_1d(const RunConfig& config) {
  CaseResult r;
  auto mesh = std::make_shared<const Mesh>(build_mesh(config.mesh));
  if (mesh->dimension() != 1) throw ConfigError("run_case_1d needs an interval mesh");
  r.space = std::make_shared<const FESpace>(mesh, config.order);
  r.model = make_model(config);
  r.beta = beta_for(*r.space, r.model, config);
  r.reference = configured_reference(config);
  if (!r.reference) {
    double lo = mesh->node(0).x(), hi = lo;
    for (const Point& p : mesh->nodes()) {
      lo = std::min(lo, p.x());
      hi = std::max(hi, p.x());
    }
    std::optional<double> phi_lo, phi_hi;
    for (const BoundaryFacet& bf : mesh->boundary_facets()) {
      const auto it = r.model.bcs.find(bf.tag);
      if (it == r.model.bcs.end() || it->second.kind != BcKind::dirichlet)
        throw ConfigError("the closed-form 1D reference needs Dirichlet data at both ends");
      const Point x = mesh->node(mesh->element(bf.element).nodes[bf.local_facet]);
      (std::abs(x.x() - lo) < std::abs(x.x() - hi) ? phi_lo : phi_hi) = it->second.value(x);
    }
    if (!phi_lo || !phi_hi) throw ConfigError("the 1D reference needs both end points tagged");
    if (config.ay != 0.0) throw ConfigError("1D runs need ay = 0");
    const Exact1D exact(config.ax, config.kappa, polynomial_coefficients(r.model.f, lo, hi), lo, hi,
                        *phi_lo, *phi_hi);
    r.reference = std::make_shared<AnalyticReference>(exact.reference());
  }
  finish_case(r, config);
  return r;
}

CaseResult run_case_2d(const RunConfig& config) {
  CaseResult r;
  auto mesh = std::make_shared<const Mesh>(build_mesh(config.mesh));
  if (mesh->dimension() != 2) throw ConfigError("run_case_2d needs a 2D mesh");
  r.space = std::make_shared<const FESpace>(mesh, config.order);
  r.model = make_model(config);
  r.beta = beta_for(*r.space, r.model, config);
  r.reference = configured_reference(config);
  if (!r.reference) {
    const int m = config.reference.refine > 0
                      ? config.reference.refine
                      : static_cast<int>(std::ceil(8.0 * size_ratio(*mesh) - 1e-9));
    auto refined = std::make_shared<const RefinedMesh>(refine_uniform(*mesh, m));
    auto fine_mesh = std::shared_ptr<const Mesh>(refined, &refined->mesh);
    const int Pf = config.reference.order;
    auto fine = std::make_shared<const FESpace>(fine_mesh, Pf);
    std::vector<double> fine_beta;
    for (int e = 0; e < fine_mesh->n_elements(); ++e) {
      const double h = fine_mesh->element_size(e);
      fine_beta.push_back(config.beta.factor ? *config.beta.factor / h : beta_experiment(2, Pf, h));
    }
    VariantSolve ref = solve_variant(*fine, r.model, ModelVariant::classical_vms, fine_beta,
                                     config.threads);
    r.reference = std::make_shared<OverrefinedReference>(
        *mesh, refined, fine, std::move(ref.coefficients), 2 * std::max(config.order, Pf));
    r.reference_refine = m;
    r.reference_elements = fine_mesh->n_elements();
  }
  finish_case(r, config);
  return r;
}

CaseResult run_case(const RunConfig& config) {
  const std::string& g = config.mesh.generator;
  if (g == "interval") return run_case_1d(config);
  if (g != "file") return run_case_2d(config);
  return build_mesh(config.mesh).dimension() == 1 ? run_case_1d(config) : run_case_2d(config);
}

Table error_table(const CaseResult& result) {
  Table t;
  t.header = {"variant", "l2_reference", "l2_projected", "nodal_max", "boundary_trace",
              "dofs", "h_max", "condition_estimate", "projection_definite"};
  for (const ErrorReport& e : result.errors)
    t.add({std::string(variant_name(e.variant)), e.l2_reference, e.l2_projected, e.nodal_max,
           e.boundary_trace, static_cast<long long>(e.dofs), e.h_max, e.condition_estimate,
           static_cast<long long>(result.projection.definite)});
  return t;
}

Table sample_table(const CaseResult& result, int points) {
  const FESpace& space = *result.space;
  const Mesh& mesh = space.mesh();
  const bool planar = mesh.dimension() == 2;
  Table t;
  t.header = planar ? std::vector<std::string>{"s", "x", "y", "reference", "projected"}
                    : std::vector<std::string>{"x", "reference", "projected"};
  for (const VariantSolve& s : result.solves) {
    t.header.push_back(variant_name(s.variant));
    t.header.push_back(std::string(variant_name(s.variant)) + "_fine");
  }
  double lo = mesh.node(0).x(), hi = lo;
  for (const Point& p : mesh.nodes()) {
    lo = std::min(lo, p.x());
    hi = std::max(hi, p.x());
  }
  for (int i = 0; i < points; ++i) {
    const double s = double(i) / (points - 1);
    const Point x = planar ? Point(s, s) : Point(lo + s * (hi - lo), 0.0);
    std::pair<int, Point> loc;
    try {
      loc = locate(mesh, x);
    } catch (const std::out_of_range&) {
      continue;
    }
    const double ref = result.reference->value_at(x).value;
    std::vector<CsvCell> row;
    if (planar) row = {s, x.x(), x.y()};
    else row = {x.x()};
    row.push_back(ref);
    row.push_back(eval_field(space, result.projection.coefficients, loc.first, loc.second).value);
    for (const VariantSolve& v : result.solves) {
      const double val = eval_field(space, v.coefficients, loc.first, loc.second).value;
      row.push_back(val);
      row.push_back(ref - val);
    }
    t.add(std::move(row));
  }
  return t;
}

Table element_table(const CaseResult& result) {
  const FESpace& space = *result.space;
  Table t;
  t.header = {"element", "cx", "cy"};
  std::vector<std::vector<double>> dens;
  for (const VariantSolve& s : result.solves) {
    t.header.push_back(std::string(variant_name(s.variant)) + "_density");
    dens.push_back(element_error_density(space, s.coefficients, result.projection.coefficients,
                                         2 * space.order() + 2));
  }
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    const Point c = space.mesh().centroid(e);
    std::vector<CsvCell> row{static_cast<long long>(e), c.x(), c.y()};
    for (const auto& d : dens) row.push_back(d[e]);
    t.add(std::move(row));
  }
  return t;
}

std::vector<RunConfig> sweep_levels(const RunConfig& config, int levels) {
  if (levels < 2) throw ConfigError("a sweep needs at least two levels");
  const std::string& g = config.mesh.generator;
  if (g == "file") throw ConfigError("file meshes cannot be swept");
  const bool hole = g == "circular_hole" || g == "diamond_hole";
  std::vector<RunConfig> out;
  for (int k = 0; k < levels; ++k) {
    RunConfig c = config;
    if (hole) {
      if (!config.sweep.h.empty()) {
        if (k >= static_cast<int>(config.sweep.h.size())) throw ConfigError("sweep.h has too few entries");
        c.mesh.h = config.sweep.h[k];
      } else {
        c.mesh.h = config.mesh.h / std::pow(std::sqrt(2.0), k);
      }
    } else {
      int n = 0;
      if (!config.sweep.elements.empty()) {
        if (k >= static_cast<int>(config.sweep.elements.size()))
          throw ConfigError("sweep.elements has too few entries");
        n = config.sweep.elements[k];
      } else {
        n = (g == "interval" ? config.mesh.elements : config.mesh.nx) << k;
      }
      c.mesh.elements = n;
      c.mesh.nx = c.mesh.ny = n;
    }
    out.push_back(std::move(c));
  }
  return out;
}

Table convergence_sweep(const RunConfig& config, int levels) {
  const std::vector<RunConfig> cfgs = sweep_levels(config, levels);
  std::vector<std::optional<CaseResult>> results(cfgs.size());
  std::vector<std::string> failures(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  const int workers = std::clamp(config.sweep.threads, 1, static_cast<int>(cfgs.size()));
  auto work = [&](int t) {
    for (std::size_t k = t; k < cfgs.size(); k += workers) {
      try {
        results[k] = run_case(cfgs[k]);
      } catch (const SolverError& e) {
        failures[k] = e.what();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  Table t;
  t.header = {"level", "h_max", "dofs", "status"};
  for (ModelVariant v : config.variants) {
    t.header.push_back(std::string("l2_projected_") + variant_name(v));
    t.header.push_back(std::string("l2_reference_") + variant_name(v));
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    std::vector<CsvCell> row{static_cast<long long>(k)};
    if (!results[k]) {
      row.insert(row.end(), {nan, 0LL, std::string("failed")});
      for (std::size_t i = 0; i < 2 * config.variants.size(); ++i) row.push_back(nan);
      t.add(std::move(row));
      break;
    }
    const CaseResult& r = *results[k];
    row.insert(row.end(), {max_element_size(r.space->mesh()),
                           static_cast<long long>(r.space->n_dofs()), std::string("ok")});
    for (const ErrorReport& e : r.errors) {
      row.push_back(e.l2_projected);
      row.push_back(e.l2_reference);
    }
    t.add(std::move(row));
  }
  return t;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? lo : lo * std::pow(hi / lo, double(i) / (count - 1)));
  return out;
}

Table param_table(const std::vector<double>& pe, const std::vector<int>& orders) {
  Table t;
  t.header = {"Pe"};
  for (int P : orders)
    for (const char* name : {"xi_", "xi_approx_", "eta_", "eta_approx_"})
      t.header.push_back(name + std::to_string(P));
  for (double p : pe) {
    if (!(p > 0.0)) throw std::invalid_argument("param_table: Pe must be positive");
    std::vector<CsvCell> row{p};
    for (int P : orders) {
      row.push_back(xi_exact(P, p));
      row.push_back(xi_approx(P, p));
      row.push_back(eta_exact(P, p));
      row.push_back(eta_approx(P, p));
    }
    t.add(std::move(row));
  }
  return t;
}

Table greens_table(const std::vector<double>& pe, const std::vector<int>& orders,
                   const GreensQuadrature& q) {
  Table t;
  t.header = {"Pe", "P", "xi_exact", "xi_quadrature", "eta_exact", "eta_quadrature"};
  for (double p : pe) {
    for (int P : orders) {
      const double a = 1.0, h = 1.0, kappa = 1.0 / p;
      const double xi_q = 2.0 * a / h * tau_by_quadrature(P, a, kappa, h, q);
      const double eta_q = 2.0 / h * gamma_by_quadrature(P, a, kappa, h, Facet1D::right, q);
      t.add({p, static_cast<long long>(P), xi_exact(P, p), xi_q, eta_exact(P, p), eta_q});
    }
  }
  return t;
}

std::vector<std::string> write_case_outputs(const CaseResult& result, const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path base = fs::path(config.output.dir) / config.output.prefix;
  std::vector<std::string> written;
  auto emit = [&](const std::string& suffix, const Table& t) {
    const std::string path = base.string() + suffix;
    write_csv_file(path, t);
    written.push_back(path);
  };
  emit("_errors.csv", error_table(result));
  const Table samples = sample_table(result, config.output.plot_points);
  emit("_samples.csv", samples);
  if (result.space->mesh().dimension() == 2) emit("_elements.csv", element_table(result));
  if (config.output.gnuplot) {
    const std::string path = base.string() + "_samples.gp";
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    std::vector<std::string> ys{"reference", "projected"};
    for (const VariantSolve& s : result.solves) ys.push_back(variant_name(s.variant));
    write_gnuplot_stub(out, fs::path(base.string() + "_samples.csv").filename().string(), samples,
                       samples.header[0], ys, false);
    written.push_back(path);
  }
  if (config.output.matrix_market) {
    for (const VariantSolve& s : result.solves) {
      const std::string stem = base.string() + "_" + variant_name(s.variant);
      std::ofstream A(stem + "_matrix.mtx"), b(stem + "_rhs.mtx");
      if (!A || !b) throw ConfigError("cannot write '" + stem + "_*.mtx'");
      write_matrix_market(A, s.system.matrix);
      write_vector_market(b, s.system.rhs);
      written.push_back(stem + "_matrix.mtx");
      written.push_back(stem + "_rhs.mtx");
    }
  }
  return written;
}

}  // namespace nvms
