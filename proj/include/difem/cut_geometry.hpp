#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "difem/level_set.hpp"
#include "difem/mesh.hpp"
#include "difem/quadrature.hpp"

namespace difem {

enum class ElemClass : unsigned char { Plus, Minus, Cut };

/// Root of phi on the segment [p0,p1] by bisection. Requires a strict sign
/// change; at most `max_iter` halvings, stops once
/// |phi(q)| <= tol * max(|phi(p0)|, |phi(p1)|).
inline Vec2 edge_intersection(const LevelSet& ls, Vec2 p0, Vec2 p1, double tol = 1e-12,
                              int max_iter = 200) {
  double f0 = ls(p0), f1 = ls(p1);
  if (!(f0 * f1 < 0.0))
    throw NoSignChangeError("edge_intersection: phi does not change sign on the segment");
  const double scale = std::max(std::abs(f0), std::abs(f1));
  double a = 0.0, b = 1.0;
  Vec2 q = (p0 + p1) * 0.5;
  for (int it = 0; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    q = p0 + (p1 - p0) * m;
    double fm = ls(q);
    if (std::abs(fm) <= tol * scale) return q;
    if (f0 * fm < 0.0) {
      b = m;
    } else {
      a = m;
      f0 = fm;
    }
  }
  if (std::abs(ls(q)) <= tol * scale) return q;
  throw NonConvergenceError("edge_intersection: bisection did not meet tolerance");
}

/// Geometry of one interface element: the straight segment Gamma_{K,h}
/// between the two edge intersections, and the two polygonal subcells.
struct CutRecord {
  int tri = -1;
  std::array<int, 2> cut_edges{-1, -1};  // global edge ids; [0] incident path lone->v_next
  std::array<Vec2, 2> ipoints{};         // intersection on cut_edges[0], cut_edges[1]
  Vec2 gamma_mid{};
  double gamma_len = 0.0;
  Vec2 normal{};  // unit, oriented from Omega^- toward Omega^+
  std::array<Vec2, 3> tri_pts{};   // element corners, counterclockwise
  std::array<Vec2, 3> tri3_poly{}; // 3-corner subcell (lone-vertex side)
  std::array<Vec2, 4> quad_poly{}; // 4-corner subcell
  double area_minus = 0.0, area_plus = 0.0;
  bool three_corner_is_minus = false;
  int lone_local = -1;  // local index of the vertex whose sign differs
};

namespace detail {

/// Core cut construction on a standalone triangle. `signs` are the snapped
/// vertex signs (+1 in Omega^-), `snapped[k]` marks vertices lying on the
/// interface. Returns nullopt when the cut is degenerate (zero-length segment
/// or a whole edge on the interface); the element is then non-interface on
/// its area-majority side, reported through `majority_minus`.
inline std::optional<CutRecord> build_cut_core(const std::array<Vec2, 3>& pts,
                                               const std::array<int, 3>& signs,
                                               const std::array<bool, 3>& snapped,
                                               const LevelSet& ls, bool* majority_minus,
                                               double bisect_tol = 1e-12) {
  int lone = -1;
  for (int k = 0; k < 3; ++k)
    if (signs[k] != signs[(k + 1) % 3] && signs[k] != signs[(k + 2) % 3]) lone = k;
  if (lone < 0) throw InterfaceResolutionError("build_cut_core: no sign minority");

  const int a = (lone + 1) % 3, b = (lone + 2) % 3;
  auto intersect = [&](int i, int j) -> Vec2 {
    if (snapped[i]) return pts[i];
    if (snapped[j]) return pts[j];
    return edge_intersection(ls, pts[i], pts[j], bisect_tol);
  };
  Vec2 q1 = intersect(lone, a);  // on edge lone -> lone+1
  Vec2 q2 = intersect(lone, b);  // on edge lone -> lone+2

  CutRecord c;
  c.tri_pts = pts;
  c.lone_local = lone;
  c.ipoints = {q1, q2};
  c.gamma_len = norm(q2 - q1);
  c.gamma_mid = (q1 + q2) * 0.5;
  c.tri3_poly = {pts[lone], q1, q2};
  c.quad_poly = {q1, pts[a], pts[b], q2};
  const double tri3_area = std::abs(polygon_area(c.tri3_poly));
  const double quad_area = std::abs(polygon_area(c.quad_poly));
  c.three_corner_is_minus = signs[lone] > 0;
  c.area_minus = c.three_corner_is_minus ? tri3_area : quad_area;
  c.area_plus = c.three_corner_is_minus ? quad_area : tri3_area;

  const double area = std::abs(signed_area(pts[0], pts[1], pts[2]));
  const double h_k = std::max({norm(pts[1] - pts[0]), norm(pts[2] - pts[1]),
                               norm(pts[0] - pts[2])});
  if (c.gamma_len < 1e-14 * h_k || std::min(tri3_area, quad_area) < 1e-12 * area) {
    if (majority_minus) *majority_minus = c.area_minus >= c.area_plus;
    return std::nullopt;
  }

  Vec2 nrm = normalized(perp(q2 - q1));
  Vec2 plus_centroid = c.three_corner_is_minus
                           ? polygon_centroid(c.quad_poly)
                           : polygon_centroid(c.tri3_poly);
  if (dot(nrm, plus_centroid - c.gamma_mid) < 0.0) nrm = nrm * (-1.0);
  c.normal = nrm;
  return c;
}

}  // namespace detail

/// build_cut on a standalone triangle with raw level-set vertex values.
/// Throws DegenerateCutError when the cut degenerates (classify() instead
/// reclassifies such elements).
inline CutRecord build_cut(const std::array<Vec2, 3>& pts, const LevelSet& ls,
                           double snap_tol = 1e-12, double bisect_tol = 1e-12) {
  const double h_k = std::max({norm(pts[1] - pts[0]), norm(pts[2] - pts[1]),
                               norm(pts[0] - pts[2])});
  std::array<int, 3> signs{};
  std::array<bool, 3> snapped{};
  for (int k = 0; k < 3; ++k) {
    double f = ls(pts[k]);
    snapped[k] = std::abs(f) < snap_tol * h_k;
    signs[k] = snapped[k] ? 1 : (f > 0.0 ? 1 : -1);
  }
  int changes = 0;
  for (int k = 0; k < 3; ++k)
    if (signs[k] != signs[(k + 1) % 3]) ++changes;
  if (changes != 2) throw DegenerateCutError("build_cut: element is not an interface element");
  auto rec = detail::build_cut_core(pts, signs, snapped, ls, nullptr, bisect_tol);
  if (!rec) throw DegenerateCutError("build_cut: degenerate interface segment");
  return *rec;
}

struct CutGeometry {
  std::vector<ElemClass> elem_class;  // per triangle
  std::vector<int> cut_index;         // per triangle; -1 unless Cut
  std::vector<CutRecord> cuts;
  std::vector<signed char> vsign;     // snapped vertex sign, +1 in Omega^-
  std::vector<bool> vsnapped;

  std::vector<int> t_plus, t_minus;   // T_h^+ = Plus u Cut, T_h^- = Minus u Cut
  std::vector<bool> in_plus, in_minus;

  double snap_threshold = 0.0;

  bool is_cut(int t) const { return elem_class[t] == ElemClass::Cut; }
  const CutRecord& cut(int t) const { return cuts[cut_index[t]]; }

  /// Minus-side area of element t (full area for Minus elements).
  double area_minus_of(const Mesh& m, int t) const {
    return is_cut(t) ? cut(t).area_minus : m.tri_area();
  }
  double area_plus_of(const Mesh& m, int t) const {
    return is_cut(t) ? cut(t).area_plus : m.tri_area();
  }
};

/// Classify every element against the level set and build the cut records.
/// Vertex values within snap_tol*h of zero are snapped to the Omega^- side,
/// so every edge has a strict endpoint sign pattern; elements whose cut
/// degenerates (interface through a vertex or along a whole edge) are
/// non-interface elements on their area-majority side.
inline CutGeometry classify(const Mesh& mesh, const LevelSet& ls, double snap_tol = 1e-12) {
  CutGeometry g;
  const double thr = snap_tol * mesh.h();
  g.snap_threshold = thr;

  const int nv = int(mesh.vertices.size());
  g.vsign.resize(nv);
  g.vsnapped.resize(nv);
  for (int v = 0; v < nv; ++v) {
    double f = ls(mesh.vertices[v]);
    bool snap = std::abs(f) < thr;
    g.vsnapped[v] = snap;
    g.vsign[v] = snap ? 1 : (f > 0.0 ? 1 : -1);
  }

  const int nt = int(mesh.tris.size());
  g.elem_class.resize(nt);
  g.cut_index.assign(nt, -1);
  g.in_plus.assign(nt, false);
  g.in_minus.assign(nt, false);

  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tris[t];
    std::array<int, 3> signs{};
    std::array<bool, 3> snapped{};
    for (int k = 0; k < 3; ++k) {
      signs[k] = g.vsign[tr.v[k]];
      snapped[k] = g.vsnapped[tr.v[k]];
    }
    int changes = 0;
    for (int k = 0; k < 3; ++k)
      if (signs[k] != signs[(k + 1) % 3]) ++changes;
    if (changes != 0 && changes != 2)
      throw InterfaceResolutionError("classify: element with " + std::to_string(changes) +
                                     " sign-change edges");

    if (changes == 0) {
      g.elem_class[t] = signs[0] > 0 ? ElemClass::Minus : ElemClass::Plus;
      continue;
    }

    bool majority_minus = false;
    auto rec = detail::build_cut_core(mesh.tri_points(t), signs, snapped, ls, &majority_minus);
    if (!rec) {
      g.elem_class[t] = majority_minus ? ElemClass::Minus : ElemClass::Plus;
      continue;
    }
    rec->tri = t;
    // global ids of the two cut edges: edge (lone, lone+1) is opposite
    // vertex lone+2, edge (lone, lone+2) is opposite vertex lone+1
    const int lone = rec->lone_local;
    rec->cut_edges = {tr.e[(lone + 2) % 3], tr.e[(lone + 1) % 3]};
    g.elem_class[t] = ElemClass::Cut;
    g.cut_index[t] = int(g.cuts.size());
    g.cuts.push_back(*rec);
  }

  for (int t = 0; t < nt; ++t) {
    if (g.elem_class[t] != ElemClass::Minus) {
      g.in_plus[t] = true;
      g.t_plus.push_back(t);
    }
    if (g.elem_class[t] != ElemClass::Plus) {
      g.in_minus[t] = true;
      g.t_minus.push_back(t);
    }
  }
  return g;
}

/// Quadrature on one side of a cut element: the 3-corner subcell uses the
/// 3-point rule directly; the 4-corner subcell is the whole-element value
/// minus the complementary 3-corner value.
template <class F>
double integrate_cut_side(F&& f, const CutRecord& c, int side /* +1 or -1 */) {
  const bool three_is_requested =
      (side < 0 && c.three_corner_is_minus) || (side > 0 && !c.three_corner_is_minus);
  if (three_is_requested)
    return integrate_tri3(f, c.tri3_poly[0], c.tri3_poly[1], c.tri3_poly[2]);
  return integrate_tri3(f, c.tri_pts[0], c.tri_pts[1], c.tri_pts[2]) -
         integrate_tri3(f, c.tri3_poly[0], c.tri3_poly[1], c.tri3_poly[2]);
}

/// Quadrature of f over the minus region of any element of T_h^-.
template <class F>
double integrate_minus(F&& f, const Mesh& mesh, const CutGeometry& g, int t) {
  if (g.is_cut(t)) return integrate_cut_side(f, g.cut(t), -1);
  auto p = mesh.tri_points(t);
  return integrate_tri3(f, p[0], p[1], p[2]);
}

template <class F>
double integrate_plus(F&& f, const Mesh& mesh, const CutGeometry& g, int t) {
  if (g.is_cut(t)) return integrate_cut_side(f, g.cut(t), +1);
  auto p = mesh.tri_points(t);
  return integrate_tri3(f, p[0], p[1], p[2]);
}

/// Fixed-capacity polygon view (3 or 4 corners).
struct PolyView {
  std::array<Vec2, 4> pts{};
  int n = 0;
  const Vec2& operator[](std::size_t i) const { return pts[i]; }
  std::size_t size() const { return std::size_t(n); }
};

inline PolyView cut_minus_polygon(const CutRecord& c) {
  PolyView p;
  if (c.three_corner_is_minus) {
    p.n = 3;
    for (int i = 0; i < 3; ++i) p.pts[i] = c.tri3_poly[i];
  } else {
    p.n = 4;
    for (int i = 0; i < 4; ++i) p.pts[i] = c.quad_poly[i];
  }
  return p;
}

inline PolyView cut_plus_polygon(const CutRecord& c) {
  PolyView p;
  if (!c.three_corner_is_minus) {
    p.n = 3;
    for (int i = 0; i < 3; ++i) p.pts[i] = c.tri3_poly[i];
  } else {
    p.n = 4;
    for (int i = 0; i < 4; ++i) p.pts[i] = c.quad_poly[i];
  }
  return p;
}

inline PolyView minus_polygon(const Mesh& mesh, const CutGeometry& g, int t) {
  if (g.is_cut(t)) return cut_minus_polygon(g.cut(t));
  PolyView p;
  p.n = 3;
  auto pts = mesh.tri_points(t);
  for (int i = 0; i < 3; ++i) p.pts[i] = pts[i];
  return p;
}

inline PolyView plus_polygon(const Mesh& mesh, const CutGeometry& g, int t) {
  if (g.is_cut(t)) return cut_plus_polygon(g.cut(t));
  PolyView p;
  p.n = 3;
  auto pts = mesh.tri_points(t);
  for (int i = 0; i < 3; ++i) p.pts[i] = pts[i];
  return p;
}

struct AssumptionReport {
  bool single_crossing_ok = true;
  std::vector<int> bad_cut_edges;      // cut edges with != 1 sampled crossing
  double min_area_ratio = 0.0;         // min over cut elements of |K_h^-| / h^4
  bool area_ok = true;
  std::vector<int> bad_elements;       // elements violating the area bound
  std::vector<int> unresolved_warnings;  // elements with interface sign activity
                                         // invisible to the endpoint classification
  bool pass() const { return single_crossing_ok && area_ok; }
};

/// Executable checks behind the resolution assumptions: (i) each cut edge is
/// crossed exactly once (sampled); (ii) |K_h^-| >= c h^4 on cut elements.
/// Interface activity that the endpoint signs cannot see (an interface lobe
/// crossing an edge twice, or closed entirely inside one element) is reported
/// as a warning, not a failure.
inline AssumptionReport verify_assumptions(const Mesh& mesh, const CutGeometry& g,
                                           const LevelSet& ls, double c = 1e-6,
                                           int samples_per_edge = 16) {
  AssumptionReport rep;
  const double h = mesh.h();

  // (i) sampled crossings along cut edges
  for (const auto& cut : g.cuts) {
    for (int e : cut.cut_edges) {
      if (e < 0) continue;
      Vec2 a = mesh.vertices[mesh.edges[e].v0];
      Vec2 b = mesh.vertices[mesh.edges[e].v1];
      int s_prev = g.vsign[mesh.edges[e].v0];
      int transitions = 0;
      for (int k = 1; k <= samples_per_edge; ++k) {
        double t = double(k) / (samples_per_edge + 1);
        double f = ls(a + (b - a) * t);
        if (std::abs(f) < g.snap_threshold) continue;
        int s = f > 0.0 ? 1 : -1;
        if (s != s_prev) ++transitions;
        s_prev = s;
      }
      if (g.vsign[mesh.edges[e].v1] != s_prev) ++transitions;
      if (transitions != 1) {
        rep.single_crossing_ok = false;
        rep.bad_cut_edges.push_back(e);
      }
    }
  }

  // (ii) minus-side area bound on cut elements
  rep.min_area_ratio = std::numeric_limits<double>::infinity();
  const double h4 = h * h * h * h;
  for (const auto& cut : g.cuts) {
    double ratio = cut.area_minus / h4;
    rep.min_area_ratio = std::min(rep.min_area_ratio, ratio);
    if (ratio < c) {
      rep.area_ok = false;
      rep.bad_elements.push_back(cut.tri);
    }
  }
  if (g.cuts.empty()) rep.min_area_ratio = 0.0;

  // warnings: hidden sign activity on uncrossed edges and inside non-interface
  // elements (e.g. an interface component contained in a single element)
  std::vector<bool> edge_is_cut(mesh.edges.size(), false);
  for (const auto& cut : g.cuts)
    for (int e : cut.cut_edges)
      if (e >= 0) edge_is_cut[e] = true;
  std::vector<bool> warned(mesh.tris.size(), false);
  auto warn = [&](int t) {
    if (t >= 0 && !warned[t]) {
      warned[t] = true;
      rep.unresolved_warnings.push_back(t);
    }
  };
  for (int e = 0; e < int(mesh.edges.size()); ++e) {
    if (edge_is_cut[e]) continue;
    if (g.vsign[mesh.edges[e].v0] != g.vsign[mesh.edges[e].v1]) continue;
    Vec2 a = mesh.vertices[mesh.edges[e].v0];
    Vec2 b = mesh.vertices[mesh.edges[e].v1];
    int s0 = g.vsign[mesh.edges[e].v0];
    for (int k = 1; k <= samples_per_edge; ++k) {
      double t = double(k) / (samples_per_edge + 1);
      double f = ls(a + (b - a) * t);
      if (std::abs(f) >= g.snap_threshold && (f > 0.0 ? 1 : -1) != s0) {
        warn(mesh.edge_tris[e][0]);
        break;
      }
    }
  }
  for (int t = 0; t < int(mesh.tris.size()); ++t) {
    if (g.elem_class[t] == ElemClass::Cut) continue;
    int cls = g.elem_class[t] == ElemClass::Minus ? 1 : -1;
    auto p = mesh.tri_points(t);
    bool bad = false;
    for (int i = 1; i <= 3 && !bad; ++i)
      for (int j = 1; i + j <= 4 && !bad; ++j) {
        double l1 = i / 5.0, l2 = j / 5.0, l0 = 1.0 - l1 - l2;
        Vec2 q = p[0] * l0 + p[1] * l1 + p[2] * l2;
        double f = ls(q);
        if (std::abs(f) >= g.snap_threshold && (f > 0.0 ? 1 : -1) != cls) bad = true;
      }
    if (bad) warn(t);
  }
  std::sort(rep.unresolved_warnings.begin(), rep.unresolved_warnings.end());
  return rep;
}

}  // namespace difem
