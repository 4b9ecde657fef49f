#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "difem/fe_spaces.hpp"

namespace difem {

/// Discrete inf-sup constant of the coupling form b_h(v^-; tau, v^+) over the
/// free DOFs: the smallest generalized singular value
///   alpha = min_{v^-} max_{(tau,v^+)} b_h / (|||(tau,v^+)|||_{1,h} |||v^-|||_{0,h}),
/// realized as sqrt(lambda_min) of N0^{-1/2} B N1^{-1} B^T N0^{-1/2}, where
/// N1 is the Gram matrix of the |||.|||_{1,h} norm (block-diagonal over the
/// sigma and u^+ parts) and N0 = diag(|K_h^-|). Dense in the u^- dimension;
/// intended for small meshes.
inline double estimate_infsup(const Mesh& mesh, const CutGeometry& g, const DofLayout& L,
                              const ProblemSpec& prob, int size_cap = 3000) {
  // free DOF index maps
  std::vector<int> sfree(L.n_sigma, -1), pfree(L.n_u_plus, -1);
  int ns = 0, np = 0;
  for (int i = 0; i < L.n_sigma; ++i)
    if (!L.sigma_essential[i]) sfree[i] = ns++;
  for (int i = 0; i < L.n_u_plus; ++i)
    if (!L.p1_dirichlet[i]) pfree[i] = np++;
  const int n0 = L.n_u_minus;
  const int n1 = ns + np;
  if (n0 == 0) throw ConfigError("estimate_infsup: no u^- unknowns");
  if (n0 > size_cap || n1 > 40 * size_cap)
    throw ResourceError("estimate_infsup: problem exceeds the dense size cap");

  std::vector<Eigen::Triplet<double>> tn1, tb;
  Eigen::VectorXd n0diag = Eigen::VectorXd::Zero(n0);
  const double inv_bm = 1.0 / prob.beta_minus;

  for (int t : g.t_minus) {
    std::array<int, 3> sd{};
    for (int k = 0; k < 3; ++k) sd[k] = sfree[L.sigma_of_edge[mesh.tris[t].e[k]]];
    const double am = g.area_minus_of(mesh, t);
    n0diag[L.p0_of_tri[t]] += am;
    for (int a = 0; a < 3; ++a) {
      if (sd[a] < 0) continue;
      tb.emplace_back(L.p0_of_tri[t], sd[a], rt0_div(mesh, L, t, a) * am);
      for (int b = 0; b < 3; ++b) {
        if (sd[b] < 0) continue;
        auto f = [&](Vec2 x) {
          return dot(rt0_eval(mesh, L, t, a, x), rt0_eval(mesh, L, t, b, x));
        };
        double v = inv_bm * integrate_minus(f, mesh, g, t) +
                   rt0_div(mesh, L, t, a) * rt0_div(mesh, L, t, b) * am;
        tn1.emplace_back(sd[a], sd[b], v);
      }
    }
  }
  for (int t : g.t_plus) {
    const double ap = g.area_plus_of(mesh, t);
    for (int a = 0; a < 3; ++a) {
      int ia = pfree[L.p1_of_vert[mesh.tris[t].v[a]]];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        int ib = pfree[L.p1_of_vert[mesh.tris[t].v[b]]];
        if (ib < 0) continue;
        tn1.emplace_back(ns + ia, ns + ib,
                         prob.beta_plus * dot(p1_grad(mesh, t, a), p1_grad(mesh, t, b)) * ap);
      }
    }
  }

  Eigen::SparseMatrix<double> N1(n1, n1), B(n0, n1);
  N1.setFromTriplets(tn1.begin(), tn1.end());
  B.setFromTriplets(tb.begin(), tb.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
  chol.compute(N1);
  if (chol.info() != Eigen::Success)
    throw SingularSystemError("estimate_infsup: norm Gram matrix is not SPD");

  Eigen::MatrixXd X = chol.solve(Eigen::MatrixXd(B.transpose()));
  Eigen::MatrixXd G = B * X;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j)
      G(i, j) /= std::sqrt(n0diag[i] * n0diag[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  return std::sqrt(std::max(lmin, 0.0));
}

}  // namespace difem
