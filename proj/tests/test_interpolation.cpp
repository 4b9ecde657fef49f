#include "doctest.h"

#include <random>

#include "difem/difem.hpp"

using namespace difem;

namespace {

ProblemSpec geom_only(double lo, double hi, LevelSet ls) {
  ProblemSpec p;
  p.name = "geom";
  p.lo = lo;
  p.hi = hi;
  p.levelset = std::move(ls);
  p.u_plus = [](Vec2 q) { return q.x; };
  p.u_minus = [](Vec2 q) { return q.x; };
  p.grad_u_plus = [](Vec2) -> Vec2 { return {1, 0}; };
  p.grad_u_minus = [](Vec2) -> Vec2 { return {1, 0}; };
  p.f_plus = [](Vec2) { return 0.0; };
  p.f_minus = [](Vec2) { return 0.0; };
  return p;
}

struct Setup {
  Mesh mesh;
  CutGeometry geom;
  DofLayout layout;
  InterfacePatchSet patches;
};

Setup make(const ProblemSpec& p, int level) {
  Setup s{build_mesh(p.lo, p.hi, level), {}, {}, {}};
  s.geom = classify(s.mesh, p.levelset);
  s.layout = build_layout(s.mesh, s.geom, p);
  s.patches = build_patches(s.mesh, s.geom);
  return s;
}

int patch_element_count(const InterfacePatchSet& ps) {
  int n = 0;
  for (const auto& ch : ps.chains)
    for (const auto& p : ch.patches)
      n += int(p.fan_elems.size()) + (p.bridge_elem >= 0 ? 1 : 0);
  return n;
}

struct ConstField {
  Vec2 v;
  Vec2 value(Vec2) const { return v; }
  double div(Vec2) const { return 0.0; }
};

struct LinearField {
  Vec2 value(Vec2 q) const { return q; }
  double div(Vec2) const { return 2.0; }
};

}  // namespace

TEST_CASE("patches: affine interface yields one open chain covering every cut element") {
  ProblemSpec p = geom_only(0, 1, level_set_affine(1.0, 0.0, -0.53));
  Setup s = make(p, 2);
  REQUIRE(s.patches.chains.size() == 1);
  const Chain& ch = s.patches.chains[0];
  CHECK(!ch.closed);
  CHECK(patch_element_count(s.patches) == int(s.geom.cuts.size()));
  CHECK(ch.cross_edges.size() == ch.elems.size() + 1);
  // consecutive elements share their connecting crossed edge
  for (std::size_t i = 1; i < ch.elems.size(); ++i) {
    const int e = ch.cross_edges[i];
    auto adj = s.mesh.edge_tris[e];
    bool ok = (adj[0] == ch.elems[i - 1] && adj[1] == ch.elems[i]) ||
              (adj[1] == ch.elems[i - 1] && adj[0] == ch.elems[i]);
    CHECK(ok);
  }
}

TEST_CASE("patches: Example-2 circle gives a cyclic chain with wrapped indexing") {
  ProblemSpec p = catalog(2, 1.0);
  Setup s = make(p, 3);
  REQUIRE(s.patches.chains.size() == 1);
  const Chain& ch = s.patches.chains[0];
  CHECK(ch.closed);
  CHECK(ch.cross_edges.size() == ch.elems.size());
  CHECK(patch_element_count(s.patches) == int(s.geom.cuts.size()));
  // chaining: each patch's exit edge is the next patch's anchor
  for (std::size_t i = 0; i < ch.patches.size(); ++i) {
    const Patch& cur = ch.patches[i];
    const Patch& nxt = ch.patches[(i + 1) % ch.patches.size()];
    REQUIRE(cur.bridge_elem >= 0);
    CHECK(cur.exit_edge == nxt.crossed_edges.front());
  }
  // deterministic starting patch: lowest Omega^+ vertex index
  for (const auto& q : ch.patches) CHECK(q.vertex >= ch.patches.front().vertex);
}

TEST_CASE("patches: two circles give two disjoint cyclic chains") {
  ProblemSpec p = catalog(3, 1.0);
  Setup s = make(p, 4);
  CHECK(s.patches.chains.size() == 2);
  for (const auto& ch : s.patches.chains) CHECK(ch.closed);
  CHECK(patch_element_count(s.patches) == int(s.geom.cuts.size()));
}

TEST_CASE("patches: single-bridge groups appear and anchor both crossed edges") {
  // flower at level 1: six bridges around the origin, all n_ell = 1
  ProblemSpec p = catalog(4, 1.0);
  Setup s = make(p, 1);
  REQUIRE(s.patches.chains.size() == 1);
  const Chain& ch = s.patches.chains[0];
  CHECK(ch.closed);
  CHECK(ch.patches.size() == 6);
  for (const auto& q : ch.patches) {
    CHECK(q.fan_elems.empty());
    CHECK(q.bridge_elem >= 0);
    CHECK(q.crossed_edges.size() == 1);
    CHECK(q.plus_edge >= 0);
  }
}

TEST_CASE("modified interpolation: constants and linears are untouched") {
  ProblemSpec p = catalog(2, 1.0);
  Setup s = make(p, 3);

  ConstField c10{{1.0, 0.0}};
  auto can = canonical_rt_interpolate(s.mesh, s.layout, c10);
  auto mod = modified_rt_interpolate(s.mesh, s.geom, s.layout, s.patches, c10);
  for (int i = 0; i < s.layout.n_sigma; ++i)
    CHECK(mod[i] == doctest::Approx(can[i]).epsilon(1e-12));

  LinearField lin;
  auto rep = check_commuting(s.mesh, s.geom, s.layout, s.patches, lin);
  CHECK(rep.max_defect <= 1e-12);
}

TEST_CASE("modified interpolation: canonical DOFs on edges interior to Omega^-") {
  ProblemSpec p = catalog(2, 1.0);
  Setup s = make(p, 4);
  std::mt19937_64 rng(17);
  for (int it = 0; it < 5; ++it) {
    P2VectorField f = P2VectorField::random(rng);
    auto can = canonical_rt_interpolate(s.mesh, s.layout, f);
    auto mod = modified_rt_interpolate(s.mesh, s.geom, s.layout, s.patches, f);
    for (int i = 0; i < s.layout.n_sigma; ++i) {
      const int e = s.layout.edge_of_sigma[i];
      if (s.geom.vsign[s.mesh.edges[e].v0] > 0 && s.geom.vsign[s.mesh.edges[e].v1] > 0)
        CHECK(mod[i] == can[i]);  // untouched by the recursion
    }
  }
}

TEST_CASE("commuting property across the four example geometries") {
  std::mt19937_64 rng(20240811);
  for (int ex = 1; ex <= 4; ++ex) {
    ProblemSpec p = catalog(ex, ex == 2 ? 10.0 : 1.0);
    int lv = ex == 4 ? 3 : 3;
    Setup s = make(p, lv);
    for (int it = 0; it < 10; ++it) {
      P2VectorField f = P2VectorField::random(rng);
      auto rep = check_commuting(s.mesh, s.geom, s.layout, s.patches, f);
      CHECK(rep.max_defect <= 1e-10);
    }
  }
}

TEST_CASE("commuting check catches a broken interpolant") {
  ProblemSpec p = catalog(2, 1.0);
  Setup s = make(p, 3);
  std::mt19937_64 rng(5);
  P2VectorField f = P2VectorField::random(rng);
  auto mod = modified_rt_interpolate(s.mesh, s.geom, s.layout, s.patches, f);
  // perturb one crossed-edge DOF: the defect must show up on its elements
  const Patch& q = s.patches.chains[0].patches[0];
  int e = q.crossed_edges.back();
  mod[s.layout.sigma_of_edge[e]] += 0.37;
  int t = q.bridge_elem >= 0 ? q.bridge_elem : q.fan_elems.back();
  double dh = 0.0;
  for (int k = 0; k < 3; ++k)
    dh += mod[s.layout.sigma_of_edge[s.mesh.tris[t].e[k]]] * rt0_div(s.mesh, s.layout, t, k);
  auto divf = [&](Vec2 x) { return f.div(x); };
  double pi0 = integrate_minus(divf, s.mesh, s.geom, t) / s.geom.area_minus_of(s.mesh, t);
  CHECK(std::abs(dh - pi0) > 1e-6);
}

TEST_CASE("cut-cell P0 projection: constants, linears, and the moment oracle") {
  ProblemSpec p = geom_only(0, 1, level_set_affine(1.0, 0.0, -0.51));
  Setup s = make(p, 2);

  auto c3 = l2_project_p0(s.mesh, s.geom, s.layout, [](Vec2) { return 3.0; });
  for (double v : c3) CHECK(v == doctest::Approx(3.0).epsilon(1e-13));

  auto cx = l2_project_p0(s.mesh, s.geom, s.layout, [](Vec2 q) { return q.x; });
  for (int t : s.geom.t_minus) {
    if (s.geom.is_cut(t)) {
      // area-weighted mean over the minus polygon: shoelace moment oracle
      PolyView poly = minus_polygon(s.mesh, s.geom, t);
      std::vector<Vec2> pts(poly.pts.begin(), poly.pts.begin() + poly.n);
      double area = std::abs(polygon_area(pts));
      Vec2 cen = polygon_centroid(pts);
      CHECK(cx[s.layout.p0_of_tri[t]] == doctest::Approx(cen.x).epsilon(1e-12));
      CHECK(area == doctest::Approx(s.geom.cut(t).area_minus).epsilon(1e-12));
    } else {
      auto tp = s.mesh.tri_points(t);
      Vec2 cen = (tp[0] + tp[1] + tp[2]) / 3.0;
      CHECK(cx[s.layout.p0_of_tri[t]] == doctest::Approx(cen.x).epsilon(1e-13));
    }
  }
}

TEST_CASE("interpolation error of the Example-2 exact flux decays at first order") {
  ProblemSpec p = catalog(2, 1.0);
  struct Sigma {
    double r02;
    Vec2 value(Vec2 q) const { return q * (2.0 * std::exp(dot(q, q) - r02)); }
    double div(Vec2 q) const {
      double rho = dot(q, q);
      return (4.0 * rho + 4.0) * std::exp(rho - r02);
    }
  } field{1.21};

  std::vector<double> errs;
  for (int lv = 3; lv <= 6; ++lv) {
    Setup s = make(p, lv);
    auto coef = modified_rt_interpolate(s.mesh, s.geom, s.layout, s.patches, field);
    double err2 = 0.0;
    for (int t : s.geom.t_minus) {
      PolyView poly = minus_polygon(s.mesh, s.geom, t);
      auto e2 = [&](Vec2 x) {
        Vec2 d = field.value(x) - eval_sigma(s.mesh, s.layout, s.geom, coef, t, x);
        return dot(d, d);
      };
      err2 += integrate_polygon(e2, poly, 6);
    }
    errs.push_back(std::sqrt(err2));
  }
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(std::log2(errs[i - 1] / errs[i]) >= 0.9);
}

TEST_CASE("boundedness proxy: interpolation norm controlled by the field norm") {
  ProblemSpec p = catalog(2, 1.0);
  std::mt19937_64 rng(99);
  std::vector<double> ratios;
  for (int lv = 3; lv <= 6; ++lv) {
    Setup s = make(p, lv);
    double worst = 0.0;
    for (int it = 0; it < 20; ++it) {
      P2VectorField f = P2VectorField::random(rng);
      auto coef = modified_rt_interpolate(s.mesh, s.geom, s.layout, s.patches, f);
      double num2 = 0.0, den2 = 0.0;
      for (int t : s.geom.t_minus) {
        PolyView poly = minus_polygon(s.mesh, s.geom, t);
        auto v2 = [&](Vec2 x) {
          Vec2 v = eval_sigma(s.mesh, s.layout, s.geom, coef, t, x);
          return dot(v, v);
        };
        num2 += integrate_polygon(v2, poly, 6);
        // reference norm over the full elements of T_h^- (a fixed neighborhood)
        auto tp = s.mesh.tri_points(t);
        auto ref = [&](Vec2 x) {
          Vec2 v = f.value(x);
          Vec2 g1{f.div(x), 0.0};  // crude gradient scale via div + coefficients
          (void)g1;
          return dot(v, v);
        };
        den2 += integrate_tri_ref(ref, tp[0], tp[1], tp[2], 6);
        // add the H1 part from the coefficients (exact for P2 fields)
        den2 += 0.0;
      }
      // gradient seminorm of a P2 field over the same region
      double grad2 = 0.0;
      for (int t : s.geom.t_minus) {
        auto tp = s.mesh.tri_points(t);
        auto gf = [&](Vec2 x) {
          Vec2 gx{f.cx[1] + 2 * f.cx[3] * x.x + f.cx[4] * x.y,
                  f.cx[2] + f.cx[4] * x.x + 2 * f.cx[5] * x.y};
          Vec2 gy{f.cy[1] + 2 * f.cy[3] * x.x + f.cy[4] * x.y,
                  f.cy[2] + f.cy[4] * x.x + 2 * f.cy[5] * x.y};
          return dot(gx, gx) + dot(gy, gy);
        };
        grad2 += integrate_tri_ref(gf, tp[0], tp[1], tp[2], 6);
      }
      double c = std::sqrt(num2) / (std::sqrt(den2) + std::sqrt(grad2));
      worst = std::max(worst, c);
    }
    ratios.push_back(worst);
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi <= 2.0 * lo);
}
