#pragma once

#include "difem/cut_geometry.hpp"
#include "difem/problem_spec.hpp"

namespace difem {

/// Coupled DOF maps for the three fields: RT0 fluxes on edges of T_h^-,
/// P0 values on elements of T_h^-, P1 values on vertices of T_h^+.
/// Global unknown ordering is (sigma block, u^- block, u^+ block).
struct DofLayout {
  int n_sigma = 0, n_u_minus = 0, n_u_plus = 0;

  std::vector<int> sigma_of_edge;  // -1 if the edge carries no flux DOF
  std::vector<int> edge_of_sigma;
  std::vector<int> p0_of_tri;
  std::vector<int> tri_of_p0;
  std::vector<int> p1_of_vert;
  std::vector<int> vert_of_p1;

  std::vector<Vec2> edge_normal;  // global orientation per mesh edge

  // essential values: RT0 normal flux on Neumann boundary edges of T_h^-,
  // P1 values on Dirichlet boundary vertices on the Omega^+ side
  std::vector<char> sigma_essential;
  std::vector<double> sigma_value;
  std::vector<char> p1_dirichlet;
  std::vector<double> p1_value;

  int sigma_offset() const { return 0; }
  int u_minus_offset() const { return n_sigma; }
  int u_plus_offset() const { return n_sigma + n_u_minus; }
  int total() const { return n_sigma + n_u_minus + n_u_plus; }

  int gsigma(int i) const { return i; }
  int guminus(int i) const { return n_sigma + i; }
  int guplus(int i) const { return n_sigma + n_u_minus + i; }
};

/// +1 if the global normal of edge tris[t].e[k] points out of triangle t.
inline double rt0_sign(const Mesh& mesh, const DofLayout& L, int t, int k) {
  const int e = mesh.tris[t].e[k];
  Vec2 opp = mesh.vertices[mesh.tris[t].v[k]];
  return dot(L.edge_normal[e], mesh.edge_midpoint(e) - opp) > 0.0 ? 1.0 : -1.0;
}

/// RT0 basis on triangle t for the edge opposite local vertex k, oriented by
/// the global edge normal: phi_e(x) = +- |e|/(2|K|) (x - p_opp).
inline Vec2 rt0_eval(const Mesh& mesh, const DofLayout& L, int t, int k, Vec2 x) {
  const int e = mesh.tris[t].e[k];
  const double le = mesh.edge_length(e);
  const double area = mesh.tri_area();
  Vec2 opp = mesh.vertices[mesh.tris[t].v[k]];
  return (x - opp) * (rt0_sign(mesh, L, t, k) * le / (2.0 * area));
}

inline double rt0_div(const Mesh& mesh, const DofLayout& L, int t, int k) {
  const int e = mesh.tris[t].e[k];
  return rt0_sign(mesh, L, t, k) * mesh.edge_length(e) / mesh.tri_area();
}

/// Barycentric hat for local vertex k of triangle t.
inline double p1_eval(const Mesh& mesh, int t, int k, Vec2 x) {
  auto p = mesh.tri_points(t);
  const double area2 = 2.0 * signed_area(p[0], p[1], p[2]);
  const int a = (k + 1) % 3, b = (k + 2) % 3;
  return cross(p[b] - p[a], x - p[a]) / area2;
}

inline Vec2 p1_grad(const Mesh& mesh, int t, int k) {
  auto p = mesh.tri_points(t);
  const double area2 = 2.0 * signed_area(p[0], p[1], p[2]);
  const int a = (k + 1) % 3, b = (k + 2) % 3;
  return perp(p[b] - p[a]) / area2;
}

inline DofLayout build_layout(const Mesh& mesh, const CutGeometry& g,
                              const ProblemSpec& prob) {
  DofLayout L;
  const int ne = int(mesh.edges.size());
  const int nv = int(mesh.vertices.size());
  const int nt = int(mesh.tris.size());

  L.edge_normal.resize(ne);
  for (int e = 0; e < ne; ++e) L.edge_normal[e] = mesh.edge_normal(e);

  // P0: one DOF per element of T_h^-
  L.p0_of_tri.assign(nt, -1);
  for (int t : g.t_minus) {
    L.p0_of_tri[t] = int(L.tri_of_p0.size());
    L.tri_of_p0.push_back(t);
  }
  L.n_u_minus = int(L.tri_of_p0.size());

  // RT0: one DOF per edge of T_h^-
  std::vector<bool> edge_in_minus(ne, false);
  for (int t : g.t_minus)
    for (int k = 0; k < 3; ++k) edge_in_minus[mesh.tris[t].e[k]] = true;
  L.sigma_of_edge.assign(ne, -1);
  for (int e = 0; e < ne; ++e)
    if (edge_in_minus[e]) {
      L.sigma_of_edge[e] = int(L.edge_of_sigma.size());
      L.edge_of_sigma.push_back(e);
    }
  L.n_sigma = int(L.edge_of_sigma.size());

  // P1: one DOF per vertex of T_h^+
  std::vector<bool> vert_in_plus(nv, false);
  for (int t : g.t_plus)
    for (int k = 0; k < 3; ++k) vert_in_plus[mesh.tris[t].v[k]] = true;
  L.p1_of_vert.assign(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (vert_in_plus[v]) {
      L.p1_of_vert[v] = int(L.vert_of_p1.size());
      L.vert_of_p1.push_back(v);
    }
  L.n_u_plus = int(L.vert_of_p1.size());

  for (int side = 0; side < 4; ++side)
    if (prob.bc[side] != BcKind::Dirichlet && prob.bc[side] != BcKind::Neumann)
      throw ConfigError("build_layout: boundary segment without a condition");

  // Dirichlet values on Omega^+-side boundary vertices of T_h^+. Vertices on
  // the Omega^- side of interface elements stay free: their data enters
  // through the boundary term of the mixed form.
  L.p1_dirichlet.assign(L.n_u_plus, 0);
  L.p1_value.assign(L.n_u_plus, 0.0);
  std::vector<char> vert_dirichlet(nv, 0);
  for (int e = 0; e < ne; ++e) {
    if (mesh.edges[e].tag < 0) continue;
    if (prob.bc[mesh.edges[e].tag] != BcKind::Dirichlet) continue;
    vert_dirichlet[mesh.edges[e].v0] = 1;
    vert_dirichlet[mesh.edges[e].v1] = 1;
  }
  for (int i = 0; i < L.n_u_plus; ++i) {
    int v = L.vert_of_p1[i];
    if (vert_dirichlet[v] && g.vsign[v] < 0) {
      L.p1_dirichlet[i] = 1;
      L.p1_value[i] = prob.u_plus(mesh.vertices[v]);
    }
  }

  // Essential RT0 fluxes on Neumann boundary edges of T_h^-:
  // d_e = sigma . n = beta^- g_N at the edge midpoint (boundary normals are
  // outward, matching the global orientation).
  L.sigma_essential.assign(L.n_sigma, 0);
  L.sigma_value.assign(L.n_sigma, 0.0);
  for (int e = 0; e < ne; ++e) {
    if (mesh.edges[e].tag < 0 || L.sigma_of_edge[e] < 0) continue;
    if (prob.bc[mesh.edges[e].tag] != BcKind::Neumann) continue;
    if (g.vsign[mesh.edges[e].v0] < 0 || g.vsign[mesh.edges[e].v1] < 0)
      throw ConfigError("build_layout: Neumann boundary edge cut by the interface");
    int i = L.sigma_of_edge[e];
    L.sigma_essential[i] = 1;
    L.sigma_value[i] = prob.beta_minus * prob.g_neumann(mesh.edge_midpoint(e), L.edge_normal[e]);
  }
  return L;
}

struct SolutionFields {
  std::vector<double> sigma;    // RT0 coefficients
  std::vector<double> u_minus;  // P0 values
  std::vector<double> u_plus;   // P1 nodal values
  double residual = 0.0;        // ||A x - b||_inf of the constrained system
  double rel_residual = 0.0;    // residual / (||A|| ||x|| + ||b||)
  bool factorization_ok = false;
};

inline Vec2 eval_sigma(const Mesh& mesh, const DofLayout& L, const CutGeometry& g,
                       const std::vector<double>& sigma, int t, Vec2 x) {
  if (!g.in_minus[t]) throw FieldUndefinedError("sigma is not defined on this element");
  Vec2 s{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    int d = L.sigma_of_edge[mesh.tris[t].e[k]];
    s += rt0_eval(mesh, L, t, k, x) * sigma[d];
  }
  return s;
}

inline double eval_div_sigma(const Mesh& mesh, const DofLayout& L, const CutGeometry& g,
                             const std::vector<double>& sigma, int t) {
  if (!g.in_minus[t]) throw FieldUndefinedError("sigma is not defined on this element");
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    s += sigma[L.sigma_of_edge[mesh.tris[t].e[k]]] * rt0_div(mesh, L, t, k);
  return s;
}

inline double eval_u_minus(const DofLayout& L, const CutGeometry& g,
                           const std::vector<double>& u_minus, int t) {
  if (!g.in_minus[t]) throw FieldUndefinedError("u^- is not defined on this element");
  return u_minus[L.p0_of_tri[t]];
}

inline double eval_u_plus(const Mesh& mesh, const DofLayout& L, const CutGeometry& g,
                          const std::vector<double>& u_plus, int t, Vec2 x) {
  if (!g.in_plus[t]) throw FieldUndefinedError("u^+ is not defined on this element");
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    s += u_plus[L.p1_of_vert[mesh.tris[t].v[k]]] * p1_eval(mesh, t, k, x);
  return s;
}

inline Vec2 eval_grad_u_plus(const Mesh& mesh, const DofLayout& L, const CutGeometry& g,
                             const std::vector<double>& u_plus, int t) {
  if (!g.in_plus[t]) throw FieldUndefinedError("u^+ is not defined on this element");
  Vec2 s{0.0, 0.0};
  for (int k = 0; k < 3; ++k)
    s += p1_grad(mesh, t, k) * u_plus[L.p1_of_vert[mesh.tris[t].v[k]]];
  return s;
}

}  // namespace difem
