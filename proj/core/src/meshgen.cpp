// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "nvms/errors.hpp"

namespace nvms {

namespace {

/// Uniform double in [-1, 1) from the raw generator, independent of the
/// standard library's distribution implementations.
double unit_jitter(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross(b - a, c - a);
}

}  // namespace

Mesh unit_square_mesh(int nx, int ny, ElementKind kind, double perturbation, std::uint64_t seed) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("unit_square_mesh: need nx, ny >= 1");
  if (kind == ElementKind::interval) throw std::invalid_argument("unit_square_mesh: 2D kinds only");
  std::mt19937_64 rng(seed);
  std::vector<Point> nodes;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      Point p(double(i) / nx, double(j) / ny);
      if (i > 0 && i < nx && j > 0 && j < ny) {
        p.x() += perturbation * unit_jitter(rng) / nx;
        p.y() += perturbation * unit_jitter(rng) / ny;
      }
      nodes.push_back(p);
    }
  std::vector<Element> elements;
  std::vector<BoundaryFacet> boundary;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      if (kind == ElementKind::quad) {
        const int e = static_cast<int>(elements.size());
        elements.push_back({ElementKind::quad, {v00, v10, v11, v01}});
        if (j == 0) boundary.push_back({e, 0, "bottom"});
        if (i == nx - 1) boundary.push_back({e, 1, "right"});
        if (j == ny - 1) boundary.push_back({e, 2, "top"});
        if (i == 0) boundary.push_back({e, 3, "left"});
        continue;
      }
      const int e0 = static_cast<int>(elements.size());
      if ((i + j) % 2 == 0) {
        // Diagonal v00-v11.
        elements.push_back({ElementKind::triangle, {v00, v10, v11, -1}});
        elements.push_back({ElementKind::triangle, {v00, v11, v01, -1}});
        if (j == 0) boundary.push_back({e0, 0, "bottom"});
        if (i == nx - 1) boundary.push_back({e0, 1, "right"});
        if (j == ny - 1) boundary.push_back({e0 + 1, 1, "top"});
        if (i == 0) boundary.push_back({e0 + 1, 2, "left"});
      } else {
        // Diagonal v10-v01.
        elements.push_back({ElementKind::triangle, {v00, v10, v01, -1}});
        elements.push_back({ElementKind::triangle, {v10, v11, v01, -1}});
        if (j == 0) boundary.push_back({e0, 0, "bottom"});
        if (i == 0) boundary.push_back({e0, 2, "left"});
        if (i == nx - 1) boundary.push_back({e0 + 1, 0, "right"});
        if (j == ny - 1) boundary.push_back({e0 + 1, 1, "top"});
      }
    }
  return Mesh(2, std::move(nodes), std::move(elements), std::move(boundary));
}

std::vector<Point> circle_polygon(const Point& center, double radius, int n_vertices) {
  if (n_vertices < 3) throw std::invalid_argument("circle_polygon: need at least 3 vertices");
  std::vector<Point> out;
  for (int k = 0; k < n_vertices; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n_vertices;
    out.push_back(center + radius * Point(std::cos(t), std::sin(t)));
  }
  return out;
}

namespace {

struct Tri {
  std::array<int, 3> v;
  bool alive = true;
};

/// Positive when d lies strictly inside the circumcircle of the
/// counter-clockwise triangle (a, b, c).
long double in_circle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double adx = a.x() - d.x(), ady = a.y() - d.y();
  const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

/// Bowyer-Watson Delaunay triangulation; returns counter-clockwise triangles.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point>& pts) {
  std::vector<Point> p = pts;
  const int n = static_cast<int>(pts.size());
  Point lo = pts[0], hi = pts[0];
  for (const Point& q : pts) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  const Point mid = 0.5 * (lo + hi);
  const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  p.push_back(mid + Point(-20 * span, -10 * span));
  p.push_back(mid + Point(20 * span, -10 * span));
  p.push_back(mid + Point(0, 20 * span));
  std::vector<Tri> tris{{{n, n + 1, n + 2}}};
  for (int i = 0; i < n; ++i) {
    std::vector<int> bad;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      const auto& v = tris[t].v;
      if (in_circle(p[v[0]], p[v[1]], p[v[2]], p[i]) > 0) bad.push_back(t);
    }
    std::map<std::pair<int, int>, int> edge_count;
    for (int t : bad)
      for (int k = 0; k < 3; ++k) {
        int a = tris[t].v[k], b = tris[t].v[(k + 1) % 3];
        edge_count[{std::min(a, b), std::max(a, b)}]++;
      }
    for (int t : bad) {
      tris[t].alive = false;
      for (int k = 0; k < 3; ++k) {
        const int a = tris[t].v[k], b = tris[t].v[(k + 1) % 3];
        if (edge_count[{std::min(a, b), std::max(a, b)}] == 1) tris.push_back({{a, b, i}});
      }
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris)
    if (t.alive && t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
  return out;
}

bool inside_polygon(const std::vector<Point>& poly, const Point& x) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > x.y()) != (b.y() > x.y()) &&
        x.x() < (b.x() - a.x()) * (x.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

double distance_to_segment(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

}  // namespace

Mesh square_with_hole(const std::vector<Point>& hole_in, double h) {
  if (!(h > 0.0) || h > 0.5) throw std::invalid_argument("square_with_hole: h must be in (0, 0.5]");
  if (hole_in.size() < 3) throw std::invalid_argument("square_with_hole: hole needs 3+ vertices");
  std::vector<Point> hole = hole_in;
  double area = 0.0;
  for (std::size_t i = 0; i < hole.size(); ++i) area += cross(hole[i], hole[(i + 1) % hole.size()]);
  if (area < 0) std::reverse(hole.begin(), hole.end());
  Point centroid = Point::Zero();
  for (const Point& q : hole) centroid += q;
  centroid /= static_cast<double>(hole.size());

  std::mt19937_64 rng(20240611);
  const double eps = 1e-3 * h;
  // Exact coordinates and slightly perturbed copies used only to pick the
  // connectivity, so that co-circular point sets have a unique triangulation.
  std::vector<Point> pts, perturbed;
  std::vector<char> fixed;

  const int n = std::max(2, static_cast<int>(std::ceil(1.0 / h)));
  const std::array<Point, 4> corners{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
  for (int s = 0; s < 4; ++s) {
    const Point a = corners[s], b = corners[(s + 1) % 4];
    for (int k = 0; k < n; ++k) {
      const Point q = a + (double(k) / n) * (b - a);
      pts.push_back(q);
      perturbed.push_back(k == 0 ? q : q + eps * unit_jitter(rng) * (b - a));
      fixed.push_back(1);
    }
  }
  const int hole_begin = static_cast<int>(pts.size());
  for (std::size_t i = 0; i < hole.size(); ++i) {
    const Point a = hole[i], b = hole[(i + 1) % hole.size()];
    const int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h - 1e-9)));
    for (int k = 0; k < m; ++k) {
      const Point q = a + (double(k) / m) * (b - a);
      pts.push_back(q);
      if (k == 0) perturbed.push_back(q + eps * unit_jitter(rng) * (q - centroid).normalized());
      else perturbed.push_back(q + eps * unit_jitter(rng) * (b - a).normalized());
      fixed.push_back(1);
    }
  }
  const int hole_end = static_cast<int>(pts.size());

  const int rows = std::max(1, static_cast<int>(std::round(1.0 / (h * std::sqrt(3.0) / 2))) - 1);
  const double dy = 1.0 / (rows + 1);
  for (int r = 1; r <= rows; ++r) {
    const double y = r * dy;
    const bool odd = r % 2 == 1;
    for (int i = 0; i <= n; ++i) {
      const double x = odd ? (i + 0.5) / n : double(i) / n;
      if (x < 0.4 / n || x > 1.0 - 0.4 / n) continue;
      const Point q(x, y);
      if (inside_polygon(hole, q)) continue;
      double d = INFINITY;
      for (std::size_t k = 0; k < hole.size(); ++k)
        d = std::min(d, distance_to_segment(q, hole[k], hole[(k + 1) % hole.size()]));
      if (d < 0.6 * h) continue;
      pts.push_back(q);
      perturbed.push_back(q + eps * Point(unit_jitter(rng), unit_jitter(rng)));
      fixed.push_back(0);
    }
  }

  std::vector<std::array<int, 3>> tris;
  for (const auto& t : delaunay(perturbed)) {
    const Point c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    if (inside_polygon(hole, c)) continue;
    tris.push_back(t);
  }

  // Laplacian smoothing of free nodes, rejecting moves that degrade elements.
  std::vector<std::set<int>> nbr(pts.size());
  std::vector<std::vector<int>> node_tris(pts.size());
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int k = 0; k < 3; ++k) {
      node_tris[tris[t][k]].push_back(t);
      for (int l = 0; l < 3; ++l)
        if (l != k) nbr[tris[t][k]].insert(tris[t][l]);
    }
  auto min_area = [&](int v) {
    double m = INFINITY;
    for (int t : node_tris[v])
      m = std::min(m, signed_area(pts[tris[t][0]], pts[tris[t][1]], pts[tris[t][2]]));
    return m;
  };
  for (int it = 0; it < 6; ++it)
    for (std::size_t v = 0; v < pts.size(); ++v) {
      if (fixed[v] || nbr[v].empty()) continue;
      Point avg = Point::Zero();
      for (int w : nbr[v]) avg += pts[w];
      avg /= static_cast<double>(nbr[v].size());
      const Point old = pts[v];
      const double before = min_area(v);
      pts[v] = avg;
      if (min_area(v) < std::min(before, 0.1 * h * h)) pts[v] = old;
    }

  // Compact away unused nodes and tag the boundary.
  std::vector<int> remap(pts.size(), -1);
  std::vector<Point> nodes;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k)
      if (remap[t[k]] < 0) {
        remap[t[k]] = static_cast<int>(nodes.size());
        nodes.push_back(pts[t[k]]);
      }
  std::vector<Element> elements;
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> owners;
  for (const auto& t : tris) {
    const int e = static_cast<int>(elements.size());
    elements.push_back({ElementKind::triangle, {remap[t[0]], remap[t[1]], remap[t[2]], -1}});
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      owners[{std::min(a, b), std::max(a, b)}].emplace_back(e, k);
    }
  }
  auto is_hole = [&](int v) { return v >= hole_begin && v < hole_end; };
  std::vector<BoundaryFacet> boundary;
  int hole_edges = 0;
  for (const auto& [key, list] : owners) {
    if (list.size() != 1) continue;
    const bool on_hole = is_hole(key.first) && is_hole(key.second);
    hole_edges += on_hole;
    boundary.push_back({list[0].first, list[0].second, on_hole ? "hole" : "outer"});
  }
  if (hole_edges != hole_end - hole_begin)
    throw TopologyError("hole boundary not recovered by the triangulation");
  std::sort(boundary.begin(), boundary.end(), [](const BoundaryFacet& a, const BoundaryFacet& b) {
    return std::tie(a.element, a.local_facet) < std::tie(b.element, b.local_facet);
  });
  return Mesh(2, std::move(nodes), std::move(elements), std::move(boundary));
}

Mesh circular_hole_mesh(double h) {
  const double r = 0.24;
  const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
  return square_with_hole(circle_polygon(Point(0.5, 0.5), r, n), h);
}

Mesh diamond_hole_mesh(double h) {
  return square_with_hole({Point(0.25, 0.5), Point(0.5, 0.25), Point(0.75, 0.5), Point(0.5, 0.75)},
                          h);
}

namespace {

struct LatticeKey {
  int kind;  // 0 vertex, 1 edge, 2 interior
  int a, b, c;
  auto operator<=>(const LatticeKey&) const = default;
};

}  // namespace

RefinedMesh refine_uniform(const Mesh& coarse, int m) {
  if (m < 1) throw std::invalid_argument("refine_uniform: factor must be >= 1");
  std::vector<Point> nodes;
  std::map<LatticeKey, int> ids;
  std::vector<Element> elements;
  RefinedMesh out{coarse, {}, {}, {}, {}};
  std::vector<BoundaryFacet> boundary;
  std::vector<int> facet_parent;
  std::vector<std::array<double, 2>> facet_params;

  // Coarse boundary facet index by (element, local facet).
  std::map<std::pair<int, int>, int> bf_index;
  for (std::size_t i = 0; i < coarse.boundary_facets().size(); ++i) {
    const auto& bf = coarse.boundary_facets()[i];
    bf_index[{bf.element, bf.local_facet}] = static_cast<int>(i);
  }

  for (int e = 0; e < coarse.n_elements(); ++e) {
    const Element& el = coarse.element(e);
    const int nv = el.n_vertices();
    const auto verts = reference_vertices(el.kind);
    // Global id of lattice point (i, j) in this element.
    auto node_id = [&](int i, int j) -> int {
      const Point ref(double(i) / m, double(j) / m);
      LatticeKey key{2, e, i, j};
      int vertex = -1;
      for (int k = 0; k < nv; ++k)
        if ((ref - verts[k]).norm() < 1e-12) vertex = k;
      if (vertex >= 0) {
        key = {0, el.nodes[vertex], 0, 0};
      } else if (el.kind != ElementKind::interval) {
        for (int f = 0; f < nv; ++f) {
          const Point A = verts[f], B = verts[(f + 1) % nv];
          const double along = (ref - A).dot(B - A) / (B - A).squaredNorm();
          if ((A + along * (B - A) - ref).norm() > 1e-12) continue;
          const int g0 = el.nodes[f], g1 = el.nodes[(f + 1) % nv];
          const int k = static_cast<int>(std::lround(along * m));
          key = g0 < g1 ? LatticeKey{1, g0, g1, k} : LatticeKey{1, g1, g0, m - k};
          break;
        }
      }
      auto [it, inserted] = ids.try_emplace(key, static_cast<int>(nodes.size()));
      if (inserted) nodes.push_back(coarse.map_to_physical(e, ref));
      return it->second;
    };
    auto add = [&](ElementKind kind, std::initializer_list<std::array<int, 2>> lattice) {
      Element child{kind, {-1, -1, -1, -1}};
      std::array<Point, 4> refs{};
      int k = 0;
      for (const auto& ij : lattice) {
        child.nodes[k] = node_id(ij[0], ij[1]);
        refs[k] = Point(double(ij[0]) / m, double(ij[1]) / m);
        ++k;
      }
      elements.push_back(child);
      out.parent.push_back(e);
      out.parent_ref.push_back(refs);
      return static_cast<int>(elements.size()) - 1;
    };
    auto add_facet = [&](int child, int local, int coarse_facet) {
      const auto it = bf_index.find({e, coarse_facet});
      if (it == bf_index.end()) return;
      boundary.push_back({child, local, coarse.boundary_facets()[it->second].tag});
      facet_parent.push_back(it->second);
      std::array<double, 2> s{0.0, 0.0};
      if (el.kind != ElementKind::interval) {
        const Point A = verts[coarse_facet], B = verts[(coarse_facet + 1) % nv];
        const auto fv = facet_vertices(el.kind, local);
        for (int q = 0; q < 2; ++q) {
          const Point p = out.parent_ref[child][fv[q]];
          s[q] = (p - A).dot(B - A) / (B - A).squaredNorm();
        }
      }
      facet_params.push_back(s);
    };

    switch (el.kind) {
      case ElementKind::interval:
        for (int i = 0; i < m; ++i) {
          const int c = add(ElementKind::interval, {{i, 0}, {i + 1, 0}});
          if (i == 0) add_facet(c, 0, 0);
          if (i == m - 1) add_facet(c, 1, 1);
        }
        break;
      case ElementKind::triangle:
        for (int j = 0; j < m; ++j)
          for (int i = 0; i + j < m; ++i) {
            const int c = add(ElementKind::triangle, {{i, j}, {i + 1, j}, {i, j + 1}});
            if (j == 0) add_facet(c, 0, 0);
            if (i + j == m - 1) add_facet(c, 1, 1);
            if (i == 0) add_facet(c, 2, 2);
            if (i + j < m - 1) add(ElementKind::triangle, {{i + 1, j}, {i + 1, j + 1}, {i, j + 1}});
          }
        break;
      case ElementKind::quad:
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < m; ++i) {
            const int c = add(ElementKind::quad, {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}});
            if (j == 0) add_facet(c, 0, 0);
            if (i == m - 1) add_facet(c, 1, 1);
            if (j == m - 1) add_facet(c, 2, 2);
            if (i == 0) add_facet(c, 3, 3);
          }
        break;
    }
  }
  out.mesh = Mesh(coarse.dimension(), std::move(nodes), std::move(elements), std::move(boundary));
  out.facet_parent = std::move(facet_parent);
  out.facet_params = std::move(facet_params);
  return out;
}

double max_element_size(const Mesh& mesh) {
  double h = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) h = std::max(h, mesh.element_size(e));
  return h;
}

double min_element_size(const Mesh& mesh) {
  double h = INFINITY;
  for (int e = 0; e < mesh.n_elements(); ++e) h = std::min(h, mesh.element_size(e));
  return h;
}

double size_ratio(const Mesh& mesh) { return max_element_size(mesh) / min_element_size(mesh); }

}  // namespace nvms
