// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "nvms/errors.hpp"
#include "nvms/expression.hpp"

namespace nvms {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& where, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(where + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& where, const std::string& v) {
  const double d = to_double(where, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(where + ": expected an integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

void check_expression(const std::string& where, const std::string& text) {
  try {
    (void)Expression::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ScalarFn compile(const std::string& text) {
  try {
    return Expression::parse(text).function();
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile out;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      out.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    out.data_[section][key] = trim(line.substr(eq + 1));
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> KeyValueFile::get(const std::string& section,
                                             const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::vector<std::string> KeyValueFile::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

std::vector<std::string> KeyValueFile::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const auto s = data_.find(section); s != data_.end())
    for (const auto& [key, _] : s->second) out.push_back(key);
  return out;
}

void KeyValueFile::set(const std::string& section, const std::string& key,
                       const std::string& value) {
  data_[section][key] = value;
}

RunConfig run_config_from(const KeyValueFile& file) {
  static const std::map<std::string, std::set<std::string>> known{
      {"mesh", {"generator", "x_left", "x_right", "elements", "nx", "ny", "kind", "perturbation",
                "h", "file"}},
      {"model", {"order", "variants", "ax", "ay", "kappa", "f"}},
      {"beta", {"policy", "factor"}},
      {"projection", {"allow_indefinite"}},
      {"reference", {"order", "refine", "value", "grad_x", "grad_y"}},
      {"sweep", {"h", "elements", "threads"}},
      {"output", {"dir", "prefix", "plot_points", "matrix_market", "gnuplot"}},
      {"run", {"threads"}}};
  bool any_bc = false;
  for (const std::string& s : file.sections()) {
    std::set<std::string> allowed;
    if (s.rfind("bc.", 0) == 0 && s.size() > 3) {
      allowed = {"kind", "value"};
      any_bc = true;
    } else if (const auto it = known.find(s); it != known.end()) {
      allowed = it->second;
    } else {
      throw ConfigError("unknown section [" + s + "]");
    }
    for (const std::string& k : file.keys(s))
      if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in [" + s + "]");
  }

  RunConfig c;
  auto str = [&](const char* s, const char* k, std::string& dst) {
    if (auto v = file.get(s, k)) dst = *v;
  };
  auto num = [&](const char* s, const char* k, double& dst) {
    if (auto v = file.get(s, k)) dst = to_double(std::string(s) + "." + k, *v);
  };
  auto integer = [&](const char* s, const char* k, int& dst) {
    if (auto v = file.get(s, k)) dst = to_int(std::string(s) + "." + k, *v);
  };
  auto boolean = [&](const char* s, const char* k, bool& dst) {
    if (auto v = file.get(s, k)) dst = to_bool(std::string(s) + "." + k, *v);
  };

  MeshSource& m = c.mesh;
  str("mesh", "generator", m.generator);
  static const std::set<std::string> generators{"interval", "unit_square", "circular_hole",
                                                "diamond_hole", "file"};
  if (!generators.count(m.generator)) throw ConfigError("unknown mesh generator '" + m.generator + "'");
  num("mesh", "x_left", m.x_left);
  num("mesh", "x_right", m.x_right);
  integer("mesh", "elements", m.elements);
  integer("mesh", "nx", m.nx);
  integer("mesh", "ny", m.ny);
  if (auto v = file.get("mesh", "kind")) {
    if (*v == "triangle") m.kind = ElementKind::triangle;
    else if (*v == "quad") m.kind = ElementKind::quad;
    else throw ConfigError("mesh.kind: expected triangle or quad");
  }
  num("mesh", "perturbation", m.perturbation);
  num("mesh", "h", m.h);
  str("mesh", "file", m.file);
  if (m.generator == "file" && m.file.empty()) throw ConfigError("mesh.file is required");
  if (m.generator == "interval" && !(m.x_right > m.x_left))
    throw ConfigError("mesh: x_right must exceed x_left");
  if (m.elements < 1 || m.nx < 1 || m.ny < 1 || !(m.h > 0.0))
    throw ConfigError("mesh: sizes must be positive");

  const bool hole = m.generator == "circular_hole" || m.generator == "diamond_hole";
  const bool planar = hole || m.generator == "unit_square";
  if (hole) {
    c.ax = c.ay = 0.8 / std::sqrt(2.0);
    c.kappa = 0.01;
    c.bcs = {{"outer", {BcKind::dirichlet, "x + y"}}, {"hole", {BcKind::dirichlet, "0"}}};
  } else if (m.generator == "unit_square") {
    c.bcs.clear();
    for (const char* tag : {"left", "right", "bottom", "top"}) c.bcs[tag] = {};
  }
  if (planar) c.variants.pop_back();

  integer("model", "order", c.order);
  if (c.order < 1 || c.order > 3) throw ConfigError("model.order must be 1, 2 or 3");
  if (auto v = file.get("model", "variants"); v && *v != "all") {
    c.variants.clear();
    for (const std::string& name : split_list(*v)) c.variants.push_back(parse_variant(name));
    if (c.variants.empty()) throw ConfigError("model.variants is empty");
  }
  num("model", "ax", c.ax);
  num("model", "ay", c.ay);
  num("model", "kappa", c.kappa);
  if (!(c.kappa > 0.0)) throw ConfigError("model.kappa must be positive");
  str("model", "f", c.f);
  check_expression("model.f", c.f);

  if (any_bc) {
    c.bcs.clear();
    for (const std::string& s : file.sections()) {
      if (s.rfind("bc.", 0) != 0) continue;
      BcSpec bc;
      if (auto v = file.get(s, "kind")) {
        if (*v == "dirichlet") bc.kind = BcKind::dirichlet;
        else if (*v == "neumann") bc.kind = BcKind::neumann;
        else throw ConfigError(s + ".kind: expected dirichlet or neumann");
      }
      if (auto v = file.get(s, "value")) bc.value = *v;
      check_expression(s + ".value", bc.value);
      c.bcs[s.substr(3)] = bc;
    }
  }

  if (auto v = file.get("beta", "policy")) {
    if (*v == "experiment") c.beta.policy = BetaPolicy::experiment;
    else if (*v == "coercive") c.beta.policy = BetaPolicy::coercive;
    else throw ConfigError("beta.policy: expected experiment or coercive");
  }
  if (auto v = file.get("beta", "factor")) {
    c.beta.factor = to_double("beta.factor", *v);
    if (!(*c.beta.factor > 0.0)) throw ConfigError("beta.factor must be positive");
  }
  boolean("projection", "allow_indefinite", c.allow_indefinite_projection);

  integer("reference", "order", c.reference.order);
  if (c.reference.order < 1 || c.reference.order > 3)
    throw ConfigError("reference.order must be 1, 2 or 3");
  integer("reference", "refine", c.reference.refine);
  if (c.reference.refine < 0) throw ConfigError("reference.refine must be >= 0");
  for (auto [key, dst] : {std::pair{"value", &c.reference.value},
                          std::pair{"grad_x", &c.reference.grad_x},
                          std::pair{"grad_y", &c.reference.grad_y}})
    if (auto v = file.get("reference", key)) {
      check_expression(std::string("reference.") + key, *v);
      *dst = *v;
    }
  if (c.reference.value.has_value() != c.reference.grad_x.has_value())
    throw ConfigError("reference.value and reference.grad_x must be given together");

  if (auto v = file.get("sweep", "h"))
    for (const std::string& item : split_list(*v)) c.sweep.h.push_back(to_double("sweep.h", item));
  if (auto v = file.get("sweep", "elements"))
    for (const std::string& item : split_list(*v))
      c.sweep.elements.push_back(to_int("sweep.elements", item));
  integer("sweep", "threads", c.sweep.threads);

  str("output", "dir", c.output.dir);
  str("output", "prefix", c.output.prefix);
  integer("output", "plot_points", c.output.plot_points);
  if (c.output.plot_points < 2) throw ConfigError("output.plot_points must be >= 2");
  boolean("output", "matrix_market", c.output.matrix_market);
  boolean("output", "gnuplot", c.output.gnuplot);
  integer("run", "threads", c.threads);
  if (c.threads < 1 || c.sweep.threads < 1) throw ConfigError("threads must be >= 1");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  try {
    RunConfig c = run_config_from(KeyValueFile::load(path));
    const std::filesystem::path mesh_file(c.mesh.file);
    if (!c.mesh.file.empty() && mesh_file.is_relative())
      c.mesh.file = (std::filesystem::path(path).parent_path() / mesh_file).string();
    return c;
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

PhysicalModel make_model(const RunConfig& config) {
  PhysicalModel model;
  model.a = constant_vector(config.ax, config.ay);
  model.kappa = constant_field(config.kappa);
  model.f = compile(config.f);
  for (const auto& [tag, bc] : config.bcs) model.bcs[tag] = {bc.kind, compile(bc.value)};
  return model;
}

}  // namespace nvms
