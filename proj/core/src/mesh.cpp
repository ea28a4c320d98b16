// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/LU>

#include "nvms/errors.hpp"

namespace nvms {

namespace {

const std::array<Point, 2> kIntervalVertices{Point(0, 0), Point(1, 0)};
const std::array<Point, 3> kTriangleVertices{Point(0, 0), Point(1, 0), Point(0, 1)};
const std::array<Point, 4> kQuadVertices{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};

std::string kind_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::interval: return "interval";
    case ElementKind::triangle: return "triangle";
    case ElementKind::quad: return "quad";
  }
  return "?";
}

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

int vertex_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::interval: return 2;
    case ElementKind::triangle: return 3;
    case ElementKind::quad: return 4;
  }
  return 0;
}

int facet_count(ElementKind kind) { return vertex_count(kind); }

int Element::n_vertices() const { return vertex_count(kind); }

std::array<int, 2> facet_vertices(ElementKind kind, int local_facet) {
  if (kind == ElementKind::interval) return {local_facet, -1};
  const int nv = vertex_count(kind);
  return {local_facet, (local_facet + 1) % nv};
}

std::span<const Point> reference_vertices(ElementKind kind) {
  switch (kind) {
    case ElementKind::interval: return kIntervalVertices;
    case ElementKind::triangle: return kTriangleVertices;
    case ElementKind::quad: return kQuadVertices;
  }
  return {};
}

Point facet_reference_point(ElementKind kind, int local_facet, double s) {
  const auto verts = reference_vertices(kind);
  if (kind == ElementKind::interval) return verts[local_facet];
  const auto fv = facet_vertices(kind, local_facet);
  return (1.0 - s) * verts[fv[0]] + s * verts[fv[1]];
}

Mesh::Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
           std::vector<BoundaryFacet> boundary)
    : dim_(dimension),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)) {
  validate();
}

void Mesh::validate() const {
  if (dim_ != 1 && dim_ != 2) throw TopologyError("mesh dimension must be 1 or 2");
  if (elements_.empty()) throw TopologyError("mesh has no elements");
  std::vector<char> used(nodes_.size(), 0);
  for (int e = 0; e < n_elements(); ++e) {
    const Element& el = elements_[e];
    if ((dim_ == 1) != (el.kind == ElementKind::interval))
      throw TopologyError("element " + std::to_string(e) + " of kind " + kind_name(el.kind) +
                          " does not match mesh dimension");
    for (int i = 0; i < el.n_vertices(); ++i) {
      const int n = el.nodes[i];
      if (n < 0 || n >= n_nodes())
        throw TopologyError("element " + std::to_string(e) + " references node " +
                            std::to_string(n) + " beyond node count " +
                            std::to_string(n_nodes()));
      for (int j = 0; j < i; ++j)
        if (el.nodes[j] == n)
          throw TopologyError("element " + std::to_string(e) + " repeats node " +
                              std::to_string(n));
      used[n] = 1;
    }
    // det J is affine in each reference coordinate, so corner checks suffice.
    for (const Point& corner : reference_vertices(el.kind)) {
      const double det = dim_ == 1 ? jacobian(e, corner)(0, 0) : jacobian(e, corner).determinant();
      if (!(det > 0.0))
        throw TopologyError("element " + std::to_string(e) + " is inverted or degenerate");
    }
  }
  for (std::size_t n = 0; n < used.size(); ++n)
    if (!used[n]) throw TopologyError("node " + std::to_string(n) + " is not used by any element");

  // Topological boundary: facets owned by exactly one element.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> owners;
  for (int e = 0; e < n_elements(); ++e) {
    const Element& el = elements_[e];
    for (int f = 0; f < facet_count(el.kind); ++f) {
      const auto fv = facet_vertices(el.kind, f);
      std::pair<int, int> key{el.nodes[fv[0]], fv[1] < 0 ? -1 : el.nodes[fv[1]]};
      if (key.second >= 0 && key.second < key.first) std::swap(key.first, key.second);
      owners[key].emplace_back(e, f);
    }
  }
  std::set<std::pair<int, int>> open_facets;
  for (const auto& [key, list] : owners) {
    if (list.size() > 2) throw TopologyError("non-manifold facet shared by more than two elements");
    if (list.size() == 1) open_facets.insert(list.front());
  }
  std::set<std::pair<int, int>> listed;
  for (const BoundaryFacet& bf : boundary_) {
    if (bf.element < 0 || bf.element >= n_elements())
      throw TopologyError("boundary facet references element " + std::to_string(bf.element));
    if (bf.local_facet < 0 || bf.local_facet >= facet_count(elements_[bf.element].kind))
      throw TopologyError("boundary facet has invalid local facet id");
    if (!listed.insert({bf.element, bf.local_facet}).second)
      throw TopologyError("boundary facet listed twice");
    if (!open_facets.count({bf.element, bf.local_facet}))
      throw TopologyError("boundary facet (" + std::to_string(bf.element) + ", " +
                          std::to_string(bf.local_facet) + ") is interior");
  }
  if (listed.size() != open_facets.size())
    throw TopologyError("boundary facets do not cover the mesh boundary (" +
                        std::to_string(listed.size()) + " listed, " +
                        std::to_string(open_facets.size()) + " open)");
}

std::vector<std::string> Mesh::boundary_tags() const {
  std::set<std::string> tags;
  for (const auto& bf : boundary_) tags.insert(bf.tag);
  return {tags.begin(), tags.end()};
}

Point Mesh::map_to_physical(int e, const Point& ref) const {
  const Element& el = elements_[e];
  switch (el.kind) {
    case ElementKind::interval: {
      const double x0 = nodes_[el.nodes[0]].x(), x1 = nodes_[el.nodes[1]].x();
      return Point(x0 + ref.x() * (x1 - x0), 0.0);
    }
    case ElementKind::triangle: {
      const Point& p0 = nodes_[el.nodes[0]];
      return p0 + ref.x() * (nodes_[el.nodes[1]] - p0) + ref.y() * (nodes_[el.nodes[2]] - p0);
    }
    case ElementKind::quad: {
      const double u = ref.x(), v = ref.y();
      return (1 - u) * (1 - v) * nodes_[el.nodes[0]] + u * (1 - v) * nodes_[el.nodes[1]] +
             u * v * nodes_[el.nodes[2]] + (1 - u) * v * nodes_[el.nodes[3]];
    }
  }
  return Point::Zero();
}

Eigen::Matrix2d Mesh::jacobian(int e, const Point& ref) const {
  const Element& el = elements_[e];
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  switch (el.kind) {
    case ElementKind::interval:
      J(0, 0) = nodes_[el.nodes[1]].x() - nodes_[el.nodes[0]].x();
      J(1, 1) = 1.0;
      break;
    case ElementKind::triangle: {
      const Point& p0 = nodes_[el.nodes[0]];
      J.col(0) = nodes_[el.nodes[1]] - p0;
      J.col(1) = nodes_[el.nodes[2]] - p0;
      break;
    }
    case ElementKind::quad: {
      const double u = ref.x(), v = ref.y();
      const Point& p0 = nodes_[el.nodes[0]];
      const Point& p1 = nodes_[el.nodes[1]];
      const Point& p2 = nodes_[el.nodes[2]];
      const Point& p3 = nodes_[el.nodes[3]];
      J.col(0) = (1 - v) * (p1 - p0) + v * (p2 - p3);
      J.col(1) = (1 - u) * (p3 - p0) + u * (p2 - p1);
      break;
    }
  }
  return J;
}

std::array<Eigen::Matrix2d, 2> Mesh::map_hessian(int e) const {
  std::array<Eigen::Matrix2d, 2> H{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
  const Element& el = elements_[e];
  if (el.kind != ElementKind::quad) return H;
  const Point mixed = nodes_[el.nodes[0]] - nodes_[el.nodes[1]] + nodes_[el.nodes[2]] -
                      nodes_[el.nodes[3]];
  for (int k = 0; k < 2; ++k) {
    H[k](0, 1) = mixed[k];
    H[k](1, 0) = mixed[k];
  }
  return H;
}

Point Mesh::facet_normal(int e, int local_facet) const {
  const Element& el = elements_[e];
  if (el.kind == ElementKind::interval) return Point(local_facet == 0 ? -1.0 : 1.0, 0.0);
  const auto fv = facet_vertices(el.kind, local_facet);
  const Point t = nodes_[el.nodes[fv[1]]] - nodes_[el.nodes[fv[0]]];
  // Counter-clockwise elements: outward normal is the tangent rotated clockwise.
  return Point(t.y(), -t.x()).normalized();
}

double Mesh::facet_measure(int e, int local_facet) const {
  const Element& el = elements_[e];
  if (el.kind == ElementKind::interval) return 1.0;
  const auto fv = facet_vertices(el.kind, local_facet);
  return (nodes_[el.nodes[fv[1]]] - nodes_[el.nodes[fv[0]]]).norm();
}

double Mesh::element_measure(int e) const {
  const Element& el = elements_[e];
  if (el.kind == ElementKind::interval)
    return nodes_[el.nodes[1]].x() - nodes_[el.nodes[0]].x();
  double twice_area = 0.0;
  const int nv = el.n_vertices();
  for (int i = 0; i < nv; ++i)
    twice_area += cross(nodes_[el.nodes[i]], nodes_[el.nodes[(i + 1) % nv]]);
  return 0.5 * twice_area;
}

double Mesh::element_size(int e) const {
  const Element& el = elements_[e];
  if (el.kind == ElementKind::interval) return element_measure(e);
  double h = 0.0;
  const int nv = el.n_vertices();
  for (int i = 0; i < nv; ++i)
    h = std::max(h, (nodes_[el.nodes[(i + 1) % nv]] - nodes_[el.nodes[i]]).norm());
  return h;
}

Point Mesh::centroid(int e) const {
  const Element& el = elements_[e];
  return map_to_physical(e, el.kind == ElementKind::triangle ? Point(1.0 / 3, 1.0 / 3)
                                                               : Point(0.5, 0.5));
}

Mesh build_interval_mesh(double x_left, double x_right, int n_elements) {
  if (n_elements < 1) throw std::invalid_argument("build_interval_mesh: need at least one element");
  if (!(x_right > x_left)) throw std::invalid_argument("build_interval_mesh: degenerate interval");
  std::vector<Point> nodes;
  nodes.reserve(n_elements + 1);
  const double h = (x_right - x_left) / n_elements;
  for (int i = 0; i <= n_elements; ++i)
    nodes.emplace_back(i == n_elements ? x_right : x_left + i * h, 0.0);
  std::vector<Element> elements(n_elements);
  for (int i = 0; i < n_elements; ++i) {
    elements[i].kind = ElementKind::interval;
    elements[i].nodes = {i, i + 1, -1, -1};
  }
  std::vector<BoundaryFacet> boundary{{0, 0, "left"}, {n_elements - 1, 1, "right"}};
  return Mesh(1, std::move(nodes), std::move(elements), std::move(boundary));
}

namespace {

/// Next non-empty, non-comment line split into tokens.
bool next_tokens(std::istream& in, std::vector<std::string>& tokens, int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    tokens.clear();
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (!tokens.empty()) return true;
  }
  return false;
}

double to_double(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": expected a number, got '" + s + "'");
  }
}

int to_int(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + s + "'");
  }
}

int expect_header(std::istream& in, const std::string& keyword, int& line_no) {
  std::vector<std::string> tok;
  if (!next_tokens(in, tok, line_no))
    throw ParseError("unexpected end of mesh file, expected '" + keyword + "'");
  if (tok.size() != 2 || tok[0] != keyword)
    throw ParseError("line " + std::to_string(line_no) + ": expected '" + keyword + " <count>'");
  const int n = to_int(tok[1], line_no);
  if (n < 0) throw ParseError("line " + std::to_string(line_no) + ": negative count");
  return n;
}

}  // namespace

Mesh parse_mesh(std::istream& in) {
  int line_no = 0;
  const int dim = expect_header(in, "dim", line_no);
  if (dim != 1 && dim != 2) throw ParseError("unsupported mesh dimension " + std::to_string(dim));
  std::vector<std::string> tok;

  const int n_nodes = expect_header(in, "nodes", line_no);
  std::vector<Point> nodes(n_nodes, Point::Zero());
  for (int i = 0; i < n_nodes; ++i) {
    if (!next_tokens(in, tok, line_no) || static_cast<int>(tok.size()) != dim)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                       " coordinates");
    for (int k = 0; k < dim; ++k) nodes[i][k] = to_double(tok[k], line_no);
  }

  const int n_elements = expect_header(in, "elements", line_no);
  std::vector<Element> elements(n_elements);
  for (int e = 0; e < n_elements; ++e) {
    if (!next_tokens(in, tok, line_no)) throw ParseError("unexpected end of element list");
    Element& el = elements[e];
    if (tok[0] == "interval") el.kind = ElementKind::interval;
    else if (tok[0] == "triangle") el.kind = ElementKind::triangle;
    else if (tok[0] == "quad") el.kind = ElementKind::quad;
    else throw ParseError("line " + std::to_string(line_no) + ": unknown element kind '" + tok[0] + "'");
    if (static_cast<int>(tok.size()) != 1 + el.n_vertices())
      throw ParseError("line " + std::to_string(line_no) + ": wrong node count for " + tok[0]);
    for (int i = 0; i < el.n_vertices(); ++i) el.nodes[i] = to_int(tok[1 + i], line_no);
  }

  const int n_bf = expect_header(in, "bfacets", line_no);
  std::vector<BoundaryFacet> boundary(n_bf);
  for (int i = 0; i < n_bf; ++i) {
    if (!next_tokens(in, tok, line_no) || tok.size() != 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'elem local_facet tag'");
    boundary[i] = {to_int(tok[0], line_no), to_int(tok[1], line_no), tok[2]};
  }
  return Mesh(dim, std::move(nodes), std::move(elements), std::move(boundary));
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  const auto old_precision = out.precision(17);
  out << "dim " << mesh.dimension() << "\n";
  out << "nodes " << mesh.n_nodes() << "\n";
  for (const Point& p : mesh.nodes()) {
    out << p.x();
    if (mesh.dimension() == 2) out << " " << p.y();
    out << "\n";
  }
  out << "elements " << mesh.n_elements() << "\n";
  for (const Element& el : mesh.elements()) {
    out << kind_name(el.kind);
    for (int i = 0; i < el.n_vertices(); ++i) out << " " << el.nodes[i];
    out << "\n";
  }
  out << "bfacets " << mesh.boundary_facets().size() << "\n";
  for (const BoundaryFacet& bf : mesh.boundary_facets())
    out << bf.element << " " << bf.local_facet << " " << bf.tag << "\n";
  out.precision(old_precision);
}

ElementGeometry element_geometry(const Mesh& mesh, int element) {
  if (element < 0 || element >= mesh.n_elements())
    throw std::out_of_range("element_geometry: invalid element index");
  ElementGeometry g;
  g.h = mesh.element_size(element);
  g.measure = mesh.element_measure(element);
  if (!(g.measure > 0.0) || !(g.h > 0.0))
    throw TopologyError("element " + std::to_string(element) + " has zero measure");
  g.centroid = mesh.centroid(element);
  const Element& el = mesh.element(element);
  for (int f = 0; f < facet_count(el.kind); ++f) {
    FacetGeometry fg;
    fg.measure = mesh.facet_measure(element, f);
    fg.normal = mesh.facet_normal(element, f);
    fg.c_s = g.h * fg.measure / g.measure;
    g.facets.push_back(fg);
  }
  return g;
}

QuadratureRule facet_quadrature(const Mesh& mesh, int degree) {
  if (mesh.dimension() == 1) {
    QuadratureRule r;
    r.points = {Point::Zero()};
    r.weights = {1.0};
    r.degree = degree;
    return r;
  }
  return quadrature(ElementKind::interval, degree);
}

BoundaryTagging classify_boundary(const Mesh& mesh, const VectorFn& a,
                                  const std::map<std::string, BcKind>& kinds, int degree) {
  BoundaryTagging tagging;
  tagging.degree = degree;
  const QuadratureRule rule = facet_quadrature(mesh, degree);
  for (const BoundaryFacet& bf : mesh.boundary_facets()) {
    const auto it = kinds.find(bf.tag);
    if (it == kinds.end()) throw ConfigError("no boundary condition for tag '" + bf.tag + "'");
    FacetTagging ft;
    ft.kind = it->second;
    const Point n = mesh.facet_normal(bf.element, bf.local_facet);
    const ElementKind kind = mesh.element(bf.element).kind;
    ft.outflow_facet = true;
    for (const Point& q : rule.points) {
      const Point x = mesh.map_to_physical(bf.element, facet_reference_point(kind, bf.local_facet, q.x()));
      const Orientation o = a(x).dot(n) >= 0.0 ? Orientation::outflow : Orientation::inflow;
      ft.params.push_back(q.x());
      ft.orientation.push_back(o);
      if (o == Orientation::inflow) ft.outflow_facet = false;
    }
    tagging.facets.push_back(std::move(ft));
  }
  return tagging;
}

}  // namespace nvms
