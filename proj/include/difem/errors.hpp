#pragma once

#include <cstdio>
#include <fstream>

#include "difem/fe_spaces.hpp"

namespace difem {

/// Error norms over the polygonal subdomains: the gradient and L2 errors of
/// u^+ over the union of K_h^+, the sigma and u^- L2 errors over the union of
/// K_h^-. Two normalizations are carried: `grad..u_minus` divide by the
/// global exact-field norm over both subdomains (the table convention),
/// `region_*` divide by the exact norm over the same subdomain only.
/// `energy` carries the full flux norm including the divergence part.
struct ErrorRecord {
  int level = 0;
  double grad = 0.0, u_plus = 0.0, sigma = 0.0, u_minus = 0.0;  // global-relative
  double region_grad = 0.0, region_u_plus = 0.0, region_sigma = 0.0, region_u_minus = 0.0;
  double abs_grad = 0.0, abs_u_plus = 0.0, abs_sigma = 0.0, abs_u_minus = 0.0;
  double energy = 0.0;  // relative ||| . |||_{1,h} of (sigma, u^+)

  std::array<double, 4> rel() const { return {grad, u_plus, sigma, u_minus}; }
  std::array<double, 4> rel_region() const {
    return {region_grad, region_u_plus, region_sigma, region_u_minus};
  }
};

inline double convergence_rate(double coarse, double fine) {
  return std::log2(coarse / fine);
}

inline ErrorRecord compute_errors(const Mesh& mesh, const CutGeometry& g, const DofLayout& L,
                                  const ProblemSpec& prob, const SolutionFields& sol,
                                  int ref_degree = 6) {
  ErrorRecord r;
  r.level = mesh.level;
  double n_grad = 0, d_grad = 0, n_up = 0, d_up = 0, n_sg = 0, d_sg = 0, n_um = 0, d_um = 0;
  double n_div = 0, d_div = 0;
  // global exact-field norms: the gradient and the solution over both
  // subdomains
  double g_grad = 0, g_u = 0;

  for (int t : g.t_plus) {
    PolyView poly = plus_polygon(mesh, g, t);
    Vec2 gh = eval_grad_u_plus(mesh, L, g, sol.u_plus, t);
    auto e_grad = [&](Vec2 x) { Vec2 d = prob.grad_u_plus(x) - gh; return dot(d, d); };
    auto x_grad = [&](Vec2 x) { Vec2 d = prob.grad_u_plus(x); return dot(d, d); };
    auto e_val = [&](Vec2 x) {
      double d = prob.u_plus(x) - eval_u_plus(mesh, L, g, sol.u_plus, t, x);
      return d * d;
    };
    auto x_val = [&](Vec2 x) { double d = prob.u_plus(x); return d * d; };
    n_grad += integrate_polygon(e_grad, poly, ref_degree);
    d_grad += integrate_polygon(x_grad, poly, ref_degree);
    n_up += integrate_polygon(e_val, poly, ref_degree);
    d_up += integrate_polygon(x_val, poly, ref_degree);
  }
  g_grad += d_grad;
  g_u += d_up;

  for (int t : g.t_minus) {
    PolyView poly = minus_polygon(mesh, g, t);
    auto e_sig = [&](Vec2 x) {
      Vec2 d = prob.sigma_exact(x) - eval_sigma(mesh, L, g, sol.sigma, t, x);
      return dot(d, d);
    };
    auto x_sig = [&](Vec2 x) { Vec2 s = prob.sigma_exact(x); return dot(s, s); };
    double uh = eval_u_minus(L, g, sol.u_minus, t);
    auto e_um = [&](Vec2 x) { double d = prob.u_minus(x) - uh; return d * d; };
    auto x_um = [&](Vec2 x) { double d = prob.u_minus(x); return d * d; };
    auto x_gm = [&](Vec2 x) { Vec2 d = prob.grad_u_minus(x); return dot(d, d); };
    double dh = eval_div_sigma(mesh, L, g, sol.sigma, t);
    auto e_div = [&](Vec2 x) { double d = -prob.f_minus(x) - dh; return d * d; };
    auto x_div = [&](Vec2 x) { double d = prob.f_minus(x); return d * d; };
    n_sg += integrate_polygon(e_sig, poly, ref_degree);
    d_sg += integrate_polygon(x_sig, poly, ref_degree);
    n_um += integrate_polygon(e_um, poly, ref_degree);
    d_um += integrate_polygon(x_um, poly, ref_degree);
    n_div += integrate_polygon(e_div, poly, ref_degree);
    d_div += integrate_polygon(x_div, poly, ref_degree);
    g_grad += integrate_polygon(x_gm, poly, ref_degree);
    g_u += integrate_polygon(x_um, poly, ref_degree);
  }

  auto rel = [](double n, double d) { return d > 0.0 ? std::sqrt(n / d) : std::sqrt(n); };
  r.abs_grad = std::sqrt(n_grad);
  r.abs_u_plus = std::sqrt(n_up);
  r.abs_sigma = std::sqrt(n_sg);
  r.abs_u_minus = std::sqrt(n_um);
  r.region_grad = rel(n_grad, d_grad);
  r.region_u_plus = rel(n_up, d_up);
  r.region_sigma = rel(n_sg, d_sg);
  r.region_u_minus = rel(n_um, d_um);
  r.grad = rel(n_grad, g_grad);
  r.u_plus = rel(n_up, g_u);
  // flux error in gradient units: |sigma - sigma_h| / (beta^- |grad u|)
  r.sigma = rel(n_sg, prob.beta_minus * prob.beta_minus * g_grad);
  r.u_minus = rel(n_um, g_u);

  const double ib = 1.0 / prob.beta_minus, bp = prob.beta_plus;
  r.energy = rel(ib * n_sg + n_div + bp * n_grad, ib * d_sg + d_div + bp * d_grad);
  return r;
}

/// Paper-style table: errors in scientific notation with 3 significant
/// digits, rates with 2 decimals, blank on the first row.
inline std::string rate_table_csv(const std::vector<ErrorRecord>& recs,
                                  const std::string& comment = "") {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "level,e_grad,rate_grad,e_uplus,rate_uplus,e_sigma,rate_sigma,e_uminus,rate_uminus\n";
  char buf[64];
  for (std::size_t i = 0; i < recs.size(); ++i) {
    out += std::to_string(recs[i].level);
    auto cur = recs[i].rel();
    for (int c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof buf, ",%.2E,", cur[c]);
      out += buf;
      if (i == 0) continue;
      auto prev = recs[i - 1].rel();
      if (prev[c] > 0.0 && cur[c] > 0.0) {
        std::snprintf(buf, sizeof buf, "%.2f", convergence_rate(prev[c], cur[c]));
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

inline std::string rate_table_text(const std::vector<ErrorRecord>& recs) {
  std::string out = "level   e_grad  rate   e_uplus rate   e_sigma rate   e_uminus rate\n";
  char buf[160];
  for (std::size_t i = 0; i < recs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "T_%d  ", recs[i].level);
    out += buf;
    auto cur = recs[i].rel();
    for (int c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof buf, "  %.2E", cur[c]);
      out += buf;
      if (i > 0 && recs[i - 1].rel()[c] > 0.0 && cur[c] > 0.0) {
        std::snprintf(buf, sizeof buf, " %5.2f", convergence_rate(recs[i - 1].rel()[c], cur[c]));
        out += buf;
      } else {
        out += "      ";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace difem
