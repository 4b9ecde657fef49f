#pragma once

#include <ostream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "difem/fe_spaces.hpp"

namespace difem {

/// Symmetric saddle-point system over the unknowns (sigma, u^-, u^+), in the
/// three-field form with the u^+ equation negated so that the interface
/// coupling blocks are exact transposes:
///
///   [ M    B^T  -C^T ] [sigma]   [ <g, tau.n>_{Gamma_b,h} ]
///   [ B    0     0   ] [u^-  ] = [ -(f^-, v^-)            ]
///   [ -C   0    -K   ] [u^+  ]   [ -(f^+, v^+)            ]
///
/// Constrained DOFs (Dirichlet / essential flux) are eliminated symmetrically:
/// their rows and columns become identity with the prescribed value on the
/// right-hand side.
struct SaddleSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  std::vector<char> constrained;
  std::vector<double> constraint_value;
  int n_sigma = 0, n_u_minus = 0, n_u_plus = 0;

  int total() const { return n_sigma + n_u_minus + n_u_plus; }

  double max_asymmetry() const {
    Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(A.transpose()) - A;
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
        m = std::max(m, std::abs(it.value()));
    return m;
  }

  /// Coordinate text dump (row, col, value), 17 significant digits.
  void dump(std::ostream& os) const {
    char buf[96];
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
        std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", long(it.row()), long(it.col()),
                      it.value());
        os << buf;
      }
  }
};

/// Omega^- closure part of a boundary edge: whole edge, a sub-segment ending
/// at the interface crossing, or nothing.
inline bool boundary_minus_subsegment(const Mesh& mesh, const CutGeometry& g,
                                      const LevelSet& ls, int e, Vec2* a, Vec2* b) {
  const int v0 = mesh.edges[e].v0, v1 = mesh.edges[e].v1;
  const int s0 = g.vsign[v0], s1 = g.vsign[v1];
  if (s0 < 0 && s1 < 0) return false;
  Vec2 p0 = mesh.vertices[v0], p1 = mesh.vertices[v1];
  if (s0 > 0 && s1 > 0) {
    *a = p0;
    *b = p1;
    return true;
  }
  // crossed edge: keep the Omega^- endpoint
  Vec2 q;
  if (g.vsnapped[v0]) q = p0;
  else if (g.vsnapped[v1]) q = p1;
  else {
    int t = mesh.edge_tris[e][0];
    q = (g.is_cut(t) && g.cut(t).cut_edges[0] == e)   ? g.cut(t).ipoints[0]
        : (g.is_cut(t) && g.cut(t).cut_edges[1] == e) ? g.cut(t).ipoints[1]
                                                      : edge_intersection(ls, p0, p1);
  }
  *a = s0 > 0 ? p0 : q;
  *b = s0 > 0 ? q : p1;
  return norm(*b - *a) > 0.0;
}

inline SaddleSystem assemble(const Mesh& mesh, const CutGeometry& g, const DofLayout& L,
                             const ProblemSpec& prob) {
  SaddleSystem S;
  S.n_sigma = L.n_sigma;
  S.n_u_minus = L.n_u_minus;
  S.n_u_plus = L.n_u_plus;
  const int N = S.total();
  S.rhs = Eigen::VectorXd::Zero(N);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(mesh.tris.size()) * 24);
  auto add_sym = [&](int i, int j, double v) {
    trip.emplace_back(i, j, v);
    if (i != j) trip.emplace_back(j, i, v);
  };

  const double inv_bm = 1.0 / prob.beta_minus;
  const double bp = prob.beta_plus;

  for (int t = 0; t < int(mesh.tris.size()); ++t) {
    if (g.in_minus[t]) {
      std::array<int, 3> sd{};
      for (int k = 0; k < 3; ++k) sd[k] = L.gsigma(L.sigma_of_edge[mesh.tris[t].e[k]]);
      const int pd = L.guminus(L.p0_of_tri[t]);
      const double am = g.area_minus_of(mesh, t);

      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
          auto f = [&](Vec2 x) {
            return dot(rt0_eval(mesh, L, t, a, x), rt0_eval(mesh, L, t, b, x));
          };
          add_sym(sd[a], sd[b], inv_bm * integrate_minus(f, mesh, g, t));
        }
      for (int a = 0; a < 3; ++a) add_sym(pd, sd[a], rt0_div(mesh, L, t, a) * am);
      S.rhs[pd] -= integrate_minus(prob.f_minus, mesh, g, t);
    }

    if (g.in_plus[t]) {
      std::array<int, 3> pv{};
      std::array<Vec2, 3> gr{};
      for (int k = 0; k < 3; ++k) {
        pv[k] = L.guplus(L.p1_of_vert[mesh.tris[t].v[k]]);
        gr[k] = p1_grad(mesh, t, k);
      }
      const double ap = g.area_plus_of(mesh, t);
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) add_sym(pv[a], pv[b], -bp * dot(gr[a], gr[b]) * ap);
      for (int a = 0; a < 3; ++a) {
        auto f = [&](Vec2 x) { return prob.f_plus(x) * p1_eval(mesh, t, a, x); };
        S.rhs[pv[a]] -= integrate_plus(f, mesh, g, t);
      }
    }

    if (g.is_cut(t)) {
      const CutRecord& c = g.cut(t);
      const Vec2 xm = c.gamma_mid;
      for (int a = 0; a < 3; ++a) {
        const int sa = L.gsigma(L.sigma_of_edge[mesh.tris[t].e[a]]);
        const double flux = dot(rt0_eval(mesh, L, t, a, xm), c.normal);
        for (int j = 0; j < 3; ++j) {
          const int pj = L.guplus(L.p1_of_vert[mesh.tris[t].v[j]]);
          const double v = c.gamma_len * flux * p1_eval(mesh, t, j, xm);
          if (v != 0.0) {
            trip.emplace_back(sa, pj, -v);
            trip.emplace_back(pj, sa, -v);
          }
        }
      }
    }
  }

  // natural boundary term <g, tau.n> over Dirichlet parts of the T_h^- boundary;
  // tau.n of the edge's own basis function is +1 in the outward orientation
  for (int e = 0; e < int(mesh.edges.size()); ++e) {
    if (mesh.edges[e].tag < 0 || L.sigma_of_edge[e] < 0) continue;
    if (prob.bc[mesh.edges[e].tag] != BcKind::Dirichlet) continue;
    Vec2 a, b;
    if (!boundary_minus_subsegment(mesh, g, prob.levelset, e, &a, &b)) continue;
    S.rhs[L.gsigma(L.sigma_of_edge[e])] +=
        integrate_segment([&](Vec2 x) { return prob.g_dirichlet(x); }, a, b);
  }

  // symmetric elimination of constrained DOFs
  S.constrained.assign(N, 0);
  S.constraint_value.assign(N, 0.0);
  for (int i = 0; i < L.n_sigma; ++i)
    if (L.sigma_essential[i]) {
      S.constrained[L.gsigma(i)] = 1;
      S.constraint_value[L.gsigma(i)] = L.sigma_value[i];
    }
  for (int i = 0; i < L.n_u_plus; ++i)
    if (L.p1_dirichlet[i]) {
      S.constrained[L.guplus(i)] = 1;
      S.constraint_value[L.guplus(i)] = L.p1_value[i];
    }

  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(trip.size() + N);
  for (const auto& tr : trip) {
    const bool ci = S.constrained[tr.row()], cj = S.constrained[tr.col()];
    if (!ci && !cj) {
      kept.push_back(tr);
    } else if (!ci && cj) {
      S.rhs[tr.row()] -= tr.value() * S.constraint_value[tr.col()];
    }
  }
  for (int i = 0; i < N; ++i)
    if (S.constrained[i]) {
      kept.emplace_back(i, i, 1.0);
      S.rhs[i] = S.constraint_value[i];
    }

  S.A.resize(N, N);
  S.A.setFromTriplets(kept.begin(), kept.end());
  S.A.makeCompressed();

  for (int k = 0; k < S.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S.A, k); it; ++it)
      if (!std::isfinite(it.value())) throw AssemblyError("assemble: non-finite matrix entry");
  if (!S.rhs.allFinite()) throw AssemblyError("assemble: non-finite right-hand side");
  return S;
}

/// Jacobi-scaled sparse LU solve with residual diagnostics.
inline SolutionFields solve(const SaddleSystem& S, const DofLayout& L) {
  const int N = S.total();
  Eigen::VectorXd d(N);
  for (int i = 0; i < N; ++i) d[i] = 0.0;
  Eigen::VectorXd rowmax = Eigen::VectorXd::Zero(N);
  for (int k = 0; k < S.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S.A, k); it; ++it) {
      if (it.row() == it.col()) d[it.row()] = std::abs(it.value());
      rowmax[it.row()] = std::max(rowmax[it.row()], std::abs(it.value()));
    }
  Eigen::VectorXd s(N);
  for (int i = 0; i < N; ++i) {
    double base = d[i] > 0.0 ? d[i] : rowmax[i];
    if (base <= 0.0) throw SingularSystemError("solve: structurally empty row");
    s[i] = 1.0 / std::sqrt(base);
  }

  Eigen::SparseMatrix<double> As = S.A;
  for (int k = 0; k < As.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(As, k); it; ++it)
      it.valueRef() *= s[it.row()] * s[it.col()];
  Eigen::VectorXd bs = S.rhs.cwiseProduct(s);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(As);
  if (lu.info() != Eigen::Success)
    throw SingularSystemError("solve: sparse factorization failed (singular system)");
  Eigen::VectorXd y = lu.solve(bs);
  if (lu.info() != Eigen::Success) throw SingularSystemError("solve: back-substitution failed");
  Eigen::VectorXd x = y.cwiseProduct(s);

  SolutionFields out;
  Eigen::VectorXd r = S.A * x - S.rhs;
  out.residual = r.lpNorm<Eigen::Infinity>();
  double anorm = 0.0;
  for (int k = 0; k < S.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S.A, k); it; ++it)
      anorm = std::max(anorm, std::abs(it.value()));
  out.rel_residual =
      out.residual / (anorm * x.lpNorm<Eigen::Infinity>() + S.rhs.lpNorm<Eigen::Infinity>() +
                      std::numeric_limits<double>::min());
  out.factorization_ok = true;

  out.sigma.assign(L.n_sigma, 0.0);
  out.u_minus.assign(L.n_u_minus, 0.0);
  out.u_plus.assign(L.n_u_plus, 0.0);
  for (int i = 0; i < L.n_sigma; ++i) out.sigma[i] = x[L.gsigma(i)];
  for (int i = 0; i < L.n_u_minus; ++i) out.u_minus[i] = x[L.guminus(i)];
  for (int i = 0; i < L.n_u_plus; ++i) out.u_plus[i] = x[L.guplus(i)];
  return out;
}

}  // namespace difem
