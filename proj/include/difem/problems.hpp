#pragma once

#include <filesystem>
#include <random>

#include "difem/assembly.hpp"
#include "difem/errors.hpp"

namespace difem {

/// Built-in experiment catalog. beta_plus = 1 in every example; the exact
/// solutions, sources and boundary data are closed forms valid on the whole
/// plane, so extension-region quadrature points are always evaluable.
inline ProblemSpec catalog(int example_id, double beta_minus) {
  if (beta_minus <= 0.0) throw ConfigError("catalog: beta_minus must be positive");
  ProblemSpec p;
  p.beta_plus = 1.0;
  p.beta_minus = beta_minus;

  switch (example_id) {
    case 1: {
      // interface y = 0.5 + 0.2 sin(pi x) on (0,1)^2, Omega^- above;
      // u = w below (scaled by beta^-), w above, with w = cos(pi x) cos(pi y) *
      // (0.5 + 0.2 sin(pi x) - y)
      p.name = "example1";
      p.lo = 0.0;
      p.hi = 1.0;
      p.levelset = level_set_sinusoidal();
      p.bc = {BcKind::Dirichlet, BcKind::Dirichlet, BcKind::Neumann, BcKind::Dirichlet};
      p.first_level = 0;
      p.default_last_level = 7;
      const double bm = beta_minus;
      auto w = [](Vec2 q) {
        return std::cos(M_PI * q.x) * std::cos(M_PI * q.y) *
               (0.5 + 0.2 * std::sin(M_PI * q.x) - q.y);
      };
      auto grad_w = [](Vec2 q) -> Vec2 {
        const double c = std::cos(M_PI * q.x), s = std::sin(M_PI * q.x);
        const double C = std::cos(M_PI * q.y), S = std::sin(M_PI * q.y);
        const double phi = 0.5 + 0.2 * s - q.y;
        return {-M_PI * s * C * phi + 0.2 * M_PI * c * c * C,
                -M_PI * c * S * phi - c * C};
      };
      auto f = [bm](Vec2 q) {
        const double c = std::cos(M_PI * q.x), s = std::sin(M_PI * q.x);
        const double C = std::cos(M_PI * q.y), S = std::sin(M_PI * q.y);
        const double phi = 0.5 + 0.2 * s - q.y;
        return bm * (2.0 * M_PI * M_PI * c * C * phi + 0.6 * M_PI * M_PI * s * c * C -
                     2.0 * M_PI * c * S);
      };
      p.u_minus = w;
      p.u_plus = [bm, w](Vec2 q) { return bm * w(q); };
      p.grad_u_minus = grad_w;
      p.grad_u_plus = [bm, grad_w](Vec2 q) { return grad_w(q) * bm; };
      p.f_minus = f;
      p.f_plus = f;
      break;
    }
    case 2: {
      // circle of radius 1.1 in (-2,2)^2, Omega^- inside;
      // u^- = e^(rho - r0^2) + beta^- r0^2 - 1, u^+ = beta^- rho, rho = x^2+y^2
      p.name = "example2";
      p.lo = -2.0;
      p.hi = 2.0;
      const double r0 = 1.1, r02 = r0 * r0;
      p.levelset = level_set_circle({0.0, 0.0}, r0);
      p.first_level = 2;
      p.default_last_level = 7;
      const double bm = beta_minus;
      p.u_minus = [=](Vec2 q) { return std::exp(dot(q, q) - r02) + bm * r02 - 1.0; };
      p.u_plus = [=](Vec2 q) { return bm * dot(q, q); };
      p.grad_u_minus = [=](Vec2 q) -> Vec2 { return q * (2.0 * std::exp(dot(q, q) - r02)); };
      p.grad_u_plus = [=](Vec2 q) -> Vec2 { return q * (2.0 * bm); };
      p.f_minus = [=](Vec2 q) {
        const double rho = dot(q, q);
        return -4.0 * bm * (rho + 1.0) * std::exp(rho - r02);
      };
      p.f_plus = [=](Vec2) { return -4.0 * bm; };
      break;
    }
    case 3: {
      // two circles of radius 0.19 at (0.3,0.5), (0.7,0.5) in (0,1)^2,
      // Omega^- inside; u^- = phi/beta^-, u^+ = phi with
      // phi = ((x-.3)^2+(y-.5)^2-r^2)((x-.7)^2+(y-.5)^2-r^2)
      p.name = "example3";
      p.lo = 0.0;
      p.hi = 1.0;
      const double r = 0.19, r2 = r * r;
      const Vec2 c1{0.3, 0.5}, c2{0.7, 0.5};
      p.levelset = level_set_two_circles(c1, c2, r);
      p.first_level = 2;
      p.default_last_level = 6;
      const double bm = beta_minus;
      auto phi = [=](Vec2 q) {
        Vec2 a = q - c1, b = q - c2;
        return (dot(a, a) - r2) * (dot(b, b) - r2);
      };
      auto grad_phi = [=](Vec2 q) -> Vec2 {
        Vec2 a = q - c1, b = q - c2;
        double d1 = dot(a, a) - r2, d2 = dot(b, b) - r2;
        return a * (2.0 * d2) + b * (2.0 * d1);
      };
      auto f = [=](Vec2 q) {
        Vec2 a = q - c1, b = q - c2;
        double d1 = dot(a, a) - r2, d2 = dot(b, b) - r2;
        return -(4.0 * (d1 + d2) + 8.0 * dot(a, b));
      };
      p.u_minus = [=](Vec2 q) { return phi(q) / bm; };
      p.u_plus = phi;
      p.grad_u_minus = [=](Vec2 q) { return grad_phi(q) / bm; };
      p.grad_u_plus = grad_phi;
      p.f_minus = f;
      p.f_plus = f;
      break;
    }
    case 4: {
      // five-petal flower in (-1,1)^2, Omega^- inside;
      // u = W / beta^{+-} with W = r^2 (r - 1/2 + 2^(sin 5 theta - 3))
      p.name = "example4";
      p.lo = -1.0;
      p.hi = 1.0;
      p.levelset = level_set_flower();
      p.first_level = 1;
      p.default_last_level = 5;
      const double bm = beta_minus;
      const double a = std::log(2.0);
      auto W = [](Vec2 q) {
        double r = norm(q), th = std::atan2(q.y, q.x);
        return r * r * (r - 0.5 + std::exp2(std::sin(5.0 * th) - 3.0));
      };
      auto grad_W = [=](Vec2 q) -> Vec2 {
        double r = norm(q);
        if (r < 1e-14) return {0.0, 0.0};
        double th = std::atan2(q.y, q.x);
        double G = std::exp2(std::sin(5.0 * th) - 3.0);
        double Wr = 3.0 * r * r - r + 2.0 * r * G;
        double Wt_over_r = 5.0 * a * r * G * std::cos(5.0 * th);
        Vec2 er{q.x / r, q.y / r}, et{-q.y / r, q.x / r};
        return er * Wr + et * Wt_over_r;
      };
      auto f = [=](Vec2 q) {
        double r = norm(q), th = std::atan2(q.y, q.x);
        double G = std::exp2(std::sin(5.0 * th) - 3.0);
        double c5 = std::cos(5.0 * th), s5 = std::sin(5.0 * th);
        return -(9.0 * r - 2.0 + 4.0 * G + 25.0 * a * G * (a * c5 * c5 - s5));
      };
      p.u_minus = [=](Vec2 q) { return W(q) / bm; };
      p.u_plus = W;  // beta^+ = 1
      p.grad_u_minus = [=](Vec2 q) { return grad_W(q) / bm; };
      p.grad_u_plus = grad_W;
      p.f_minus = f;
      p.f_plus = f;
      break;
    }
    default:
      throw UnknownExampleError("catalog: example id must be 1..4");
  }
  return p;
}

/// Affine-interface problem with a piecewise linear exact solution, the
/// strongest consistency check: the discrete scheme reproduces it exactly.
/// The interface x = x0 must avoid the dyadic vertex lines, otherwise it is
/// mesh-aligned and no element is an interface element.
inline ProblemSpec patch_test_problem(double beta_minus = 2.0, double x0 = 0.51) {
  ProblemSpec p;
  p.name = "patch-test";
  p.lo = 0.0;
  p.hi = 1.0;
  p.levelset = level_set_affine(1.0, 0.0, -x0);  // Omega^- is x > x0
  p.beta_plus = 1.0;
  p.beta_minus = beta_minus;
  p.first_level = 1;
  p.default_last_level = 5;
  const double slope = p.beta_plus / beta_minus;
  p.u_plus = [](Vec2 q) { return q.x; };
  p.u_minus = [=](Vec2 q) { return x0 + slope * (q.x - x0); };
  p.grad_u_plus = [](Vec2) -> Vec2 { return {1.0, 0.0}; };
  p.grad_u_minus = [=](Vec2) -> Vec2 { return {slope, 0.0}; };
  p.f_plus = [](Vec2) { return 0.0; };
  p.f_minus = [](Vec2) { return 0.0; };
  return p;
}

struct ProblemValidation {
  double max_jump_u = 0.0;
  double max_jump_flux = 0.0;
  double max_source_defect = 0.0;  // |f + div(beta grad u)| / scale, central differences
  bool ok(double tol_interface = 1e-10, double tol_source = 1e-6) const {
    return max_jump_u <= tol_interface && max_jump_flux <= tol_interface &&
           max_source_defect <= tol_source;
  }
};

/// Numeric sanity of a ProblemSpec: interface conditions [u]=0 and
/// [beta grad u . n]=0 sampled on the interface, and the hand-derived sources
/// checked against a central finite-difference Laplacian of each branch.
inline ProblemValidation validate_problem(const ProblemSpec& p, int n_interface = 100,
                                          int n_source = 200, unsigned seed = 20240811,
                                          double exclusion_radius = 0.0,
                                          Vec2 exclusion_center = {0.0, 0.0}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(p.lo, p.hi);
  ProblemValidation v;

  // interface points by bisection along random sign-changing segments
  double uscale = 0.0, fscale = 0.0;
  int found = 0, guard = 0;
  while (found < n_interface && guard < 100000) {
    ++guard;
    Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (p.levelset(a) * p.levelset(b) >= 0.0) continue;
    Vec2 q = edge_intersection(p.levelset, a, b, 1e-13);
    ++found;
    const double h = 1e-6 * (p.hi - p.lo);
    Vec2 gphi{(p.levelset({q.x + h, q.y}) - p.levelset({q.x - h, q.y})) / (2 * h),
              (p.levelset({q.x, q.y + h}) - p.levelset({q.x, q.y - h})) / (2 * h)};
    Vec2 n = normalized(gphi) * (-1.0);  // phi decreases toward Omega^+
    double up = p.u_plus(q), um = p.u_minus(q);
    uscale = std::max({uscale, std::abs(up), std::abs(um), 1.0});
    v.max_jump_u = std::max(v.max_jump_u, std::abs(up - um));
    double fp = p.beta_plus * dot(p.grad_u_plus(q), n);
    double fm = p.beta_minus * dot(p.grad_u_minus(q), n);
    fscale = std::max({fscale, std::abs(fp), std::abs(fm), 1.0});
    v.max_jump_flux = std::max(v.max_jump_flux, std::abs(fp - fm));
  }
  v.max_jump_u /= uscale;
  v.max_jump_flux /= fscale;

  // source check: f = -beta Lap(u) per branch, five-point stencil; the
  // defect is relative to the source scale over the sample set
  const double h = 1e-5 * (p.hi - p.lo);
  double worst_abs = 0.0, f_scale = 1.0;
  for (int k = 0; k < n_source; ++k) {
    Vec2 q{u(rng), u(rng)};
    if (exclusion_radius > 0.0 && norm(q - exclusion_center) < exclusion_radius) continue;
    const bool minus_side = p.levelset(q) > 0.0;
    auto& uf = minus_side ? p.u_minus : p.u_plus;
    auto& ff = minus_side ? p.f_minus : p.f_plus;
    const double beta = minus_side ? p.beta_minus : p.beta_plus;
    double lap = (uf({q.x + h, q.y}) + uf({q.x - h, q.y}) + uf({q.x, q.y + h}) +
                  uf({q.x, q.y - h}) - 4.0 * uf(q)) /
                 (h * h);
    double f_fd = -beta * lap;
    double f_cl = ff(q);
    f_scale = std::max(f_scale, std::abs(f_cl));
    worst_abs = std::max(worst_abs, std::abs(f_fd - f_cl));
  }
  v.max_source_defect = worst_abs / f_scale;
  return v;
}

struct StudyOptions {
  std::string out_dir;     // empty: no files
  int ref_degree = 6;
  double assumption_c = 1e-6;
  double snap_tol = 1e-12;
  bool verbose = false;
};

struct LevelResult {
  ErrorRecord errors;
  AssumptionReport assumptions;
  double solver_rel_residual = 0.0;
  int n_unknowns = 0;
};

/// One convergence study: per level build -> classify -> verify assumptions ->
/// layout -> assemble -> solve -> errors. Fails fast with level context when
/// the interface is not resolvable.
inline std::vector<LevelResult> run_convergence(const ProblemSpec& prob, int level_lo,
                                                int level_hi, const StudyOptions& opt = {}) {
  std::vector<LevelResult> results;
  for (int lv = level_lo; lv <= level_hi; ++lv) {
    Mesh mesh = build_mesh(prob.lo, prob.hi, lv);
    CutGeometry g = classify(mesh, prob.levelset, opt.snap_tol);
    AssumptionReport rep = verify_assumptions(mesh, g, prob.levelset, opt.assumption_c);
    const bool interface_missed = g.cuts.empty() && !rep.unresolved_warnings.empty();
    if (!rep.pass() || interface_missed) {
      std::string what = "assumption check failed at level " + std::to_string(lv);
      if (!rep.bad_cut_edges.empty())
        what += " (multiple interface crossings on cut edge " +
                std::to_string(rep.bad_cut_edges.front()) + ")";
      if (!rep.bad_elements.empty())
        what += " (vanishing K_h^- area on element " +
                std::to_string(rep.bad_elements.front()) + ")";
      if (interface_missed)
        what += " (interface crosses no edge; first affected element " +
                std::to_string(rep.unresolved_warnings.front()) + ")";
      throw InterfaceResolutionError(what);
    }
    DofLayout L = build_layout(mesh, g, prob);
    SaddleSystem S = assemble(mesh, g, L, prob);
    SolutionFields sol = solve(S, L);
    LevelResult res;
    res.errors = compute_errors(mesh, g, L, prob, sol, opt.ref_degree);
    res.assumptions = rep;
    res.solver_rel_residual = sol.rel_residual;
    res.n_unknowns = S.total();
    results.push_back(res);
    if (opt.verbose) {
      std::fprintf(stderr, "%s level %d: %d unknowns, rel residual %.2e\n",
                   prob.name.c_str(), lv, res.n_unknowns, res.solver_rel_residual);
    }
  }

  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    char tag[64];
    std::snprintf(tag, sizeof tag, "%g", prob.beta_minus);
    std::string base = prob.name + "_beta" + tag;

    std::vector<ErrorRecord> recs;
    for (const auto& r : results) recs.push_back(r.errors);
    std::ofstream csv(fs::path(opt.out_dir) / (base + ".csv"));
    csv << rate_table_csv(recs, prob.name + " beta_minus=" + tag + " seed=0 (deterministic)");

    static const char* series[4] = {"egrad", "euplus", "esigma", "euminus"};
    for (int c = 0; c < 4; ++c) {
      std::ofstream dat(fs::path(opt.out_dir) / (base + "_" + series[c] + ".dat"));
      char line[80];
      for (const auto& r : results) {
        double h = (prob.hi - prob.lo) / double(1 << r.errors.level) * std::sqrt(2.0);
        std::snprintf(line, sizeof line, "%.17g %.17g\n", h, r.errors.rel()[c]);
        dat << line;
      }
    }
  }
  return results;
}

}  // namespace difem
