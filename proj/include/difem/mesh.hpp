#pragma once

#include <cstdio>
#include <ostream>

#include "difem/common.hpp"

namespace difem {

/// Uniform triangulation of an axis-aligned square [lo,hi]^2. Level L has a
/// 2^L x 2^L grid of cells, each split by its north-east diagonal.
///
/// Entity numbering (fixed, reproducible):
///   vertices: lexicographic by (row, column), v = iy*(n+1) + ix
///   edges:    all horizontals (row-major), then verticals, then diagonals
///   triangles: per cell iy*n+ix, lower-right first, then upper-left
struct Mesh {
  double lo = 0.0, hi = 1.0;
  int level = 0;
  int n = 1;  // cells per side, n = 2^level

  std::vector<Vec2> vertices;

  struct Edge {
    int v0 = -1, v1 = -1;
    int tag = -1;  // -1 interior, else boundary segment: 0 bottom, 1 right, 2 top, 3 left
  };
  std::vector<Edge> edges;

  struct Tri {
    std::array<int, 3> v{};  // counterclockwise
    std::array<int, 3> e{};  // e[k] is the edge opposite vertex v[k]
  };
  std::vector<Tri> tris;

  // adjacent triangles per edge; [1] == -1 on the boundary, [0] < [1] otherwise
  std::vector<std::array<int, 2>> edge_tris;

  double cell_size() const { return (hi - lo) / n; }
  double tri_area() const { double s = cell_size(); return 0.5 * s * s; }
  double tri_diameter() const { return cell_size() * std::sqrt(2.0); }
  double h() const { return tri_diameter(); }
  double domain_area() const { return (hi - lo) * (hi - lo); }

  int vertex_index(int ix, int iy) const { return iy * (n + 1) + ix; }

  Vec2 point(int v) const { return vertices[v]; }

  std::array<Vec2, 3> tri_points(int t) const {
    const Tri& tr = tris[t];
    return {vertices[tr.v[0]], vertices[tr.v[1]], vertices[tr.v[2]]};
  }

  Vec2 edge_midpoint(int e) const {
    return (vertices[edges[e].v0] + vertices[edges[e].v1]) * 0.5;
  }

  double edge_length(int e) const {
    return norm(vertices[edges[e].v1] - vertices[edges[e].v0]);
  }

  /// Unit normal pointing away from edge_tris[e][0] (the lower-indexed
  /// adjacent triangle; outward for boundary edges).
  Vec2 edge_normal(int e) const {
    Vec2 t = vertices[edges[e].v1] - vertices[edges[e].v0];
    Vec2 nrm = normalized(perp(t));
    const Tri& tr = tris[edge_tris[e][0]];
    Vec2 cen = (vertices[tr.v[0]] + vertices[tr.v[1]] + vertices[tr.v[2]]) / 3.0;
    if (dot(nrm, edge_midpoint(e) - cen) < 0.0) nrm = nrm * (-1.0);
    return nrm;
  }

  bool edge_is_boundary(int e) const { return edge_tris[e][1] < 0; }
};

inline Mesh build_mesh(double lo, double hi, int level) {
  if (!(hi > lo)) throw ConfigError("build_mesh: domain must have positive side length");
  if (level < 0) throw ConfigError("build_mesh: level must be nonnegative");

  Mesh m;
  m.lo = lo;
  m.hi = hi;
  m.level = level;
  const int n = 1 << level;
  m.n = n;
  const double s = (hi - lo) / n;

  m.vertices.reserve(std::size_t(n + 1) * (n + 1));
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix <= n; ++ix)
      m.vertices.push_back({lo + ix * s, lo + iy * s});

  // horizontals, then verticals, then diagonals
  const int nh = n * (n + 1);
  auto hedge = [&](int ix, int iy) { return iy * n + ix; };
  auto vedge = [&](int ix, int iy) { return nh + iy * (n + 1) + ix; };
  auto dedge = [&](int ix, int iy) { return 2 * nh + iy * n + ix; };

  m.edges.resize(std::size_t(2 * nh + n * n));
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      Mesh::Edge e;
      e.v0 = m.vertex_index(ix, iy);
      e.v1 = m.vertex_index(ix + 1, iy);
      e.tag = (iy == 0) ? 0 : (iy == n) ? 2 : -1;
      m.edges[hedge(ix, iy)] = e;
    }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix <= n; ++ix) {
      Mesh::Edge e;
      e.v0 = m.vertex_index(ix, iy);
      e.v1 = m.vertex_index(ix, iy + 1);
      e.tag = (ix == 0) ? 3 : (ix == n) ? 1 : -1;
      m.edges[vedge(ix, iy)] = e;
    }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      Mesh::Edge e;
      e.v0 = m.vertex_index(ix, iy);
      e.v1 = m.vertex_index(ix + 1, iy + 1);
      e.tag = -1;
      m.edges[dedge(ix, iy)] = e;
    }

  m.tris.resize(std::size_t(2) * n * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int v00 = m.vertex_index(ix, iy);
      const int v10 = m.vertex_index(ix + 1, iy);
      const int v01 = m.vertex_index(ix, iy + 1);
      const int v11 = m.vertex_index(ix + 1, iy + 1);
      const int q = iy * n + ix;
      // lower-right: (v00, v10, v11); edge k opposite vertex k
      Mesh::Tri lr;
      lr.v = {v00, v10, v11};
      lr.e = {vedge(ix + 1, iy), dedge(ix, iy), hedge(ix, iy)};
      m.tris[2 * q] = lr;
      // upper-left: (v00, v11, v01)
      Mesh::Tri ul;
      ul.v = {v00, v11, v01};
      ul.e = {hedge(ix, iy + 1), vedge(ix, iy), dedge(ix, iy)};
      m.tris[2 * q + 1] = ul;
    }

  m.edge_tris.assign(m.edges.size(), {-1, -1});
  for (int t = 0; t < int(m.tris.size()); ++t)
    for (int k = 0; k < 3; ++k) {
      auto& adj = m.edge_tris[m.tris[t].e[k]];
      if (adj[0] < 0) adj[0] = t;
      else adj[1] = t;
    }
  return m;
}

inline Mesh refine(const Mesh& m) { return build_mesh(m.lo, m.hi, m.level + 1); }

/// Children of triangle t under one uniform refinement (red refinement of the
/// structured north-east split), as indices into the level+1 mesh.
inline std::array<int, 4> child_triangles(const Mesh& m, int t) {
  const int n = m.n, n2 = 2 * n;
  const int q = t / 2, ul = t % 2;
  const int ix = q % n, iy = q / n;
  auto tri = [&](int jx, int jy, int u) { return 2 * (jy * n2 + jx) + u; };
  if (ul == 0)
    return {tri(2 * ix, 2 * iy, 0), tri(2 * ix + 1, 2 * iy, 0),
            tri(2 * ix + 1, 2 * iy, 1), tri(2 * ix + 1, 2 * iy + 1, 0)};
  return {tri(2 * ix, 2 * iy, 1), tri(2 * ix, 2 * iy + 1, 0),
          tri(2 * ix, 2 * iy + 1, 1), tri(2 * ix + 1, 2 * iy + 1, 1)};
}

inline std::pair<Vec2, double> edge_midpoint_length(const Mesh& m, int e) {
  return {m.edge_midpoint(e), m.edge_length(e)};
}

/// Plain-text dump: header line, then one entity per line, coordinates with
/// 17 significant digits.
inline void dump_mesh(const Mesh& m, std::ostream& os) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "vertices %zu edges %zu triangles %zu level %d\n",
                m.vertices.size(), m.edges.size(), m.tris.size(), m.level);
  os << buf;
  for (int v = 0; v < int(m.vertices.size()); ++v) {
    std::snprintf(buf, sizeof buf, "v %d %.17g %.17g\n", v, m.vertices[v].x, m.vertices[v].y);
    os << buf;
  }
  for (int e = 0; e < int(m.edges.size()); ++e) {
    std::snprintf(buf, sizeof buf, "e %d %d %d %d\n", e, m.edges[e].v0, m.edges[e].v1,
                  m.edges[e].tag);
    os << buf;
  }
  for (int t = 0; t < int(m.tris.size()); ++t) {
    const auto& tr = m.tris[t];
    std::snprintf(buf, sizeof buf, "t %d %d %d %d %d %d %d\n", t, tr.v[0], tr.v[1], tr.v[2],
                  tr.e[0], tr.e[1], tr.e[2]);
    os << buf;
  }
}

}  // namespace difem
