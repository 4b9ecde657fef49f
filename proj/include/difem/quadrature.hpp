#pragma once

#include "difem/common.hpp"

namespace difem {

/// Midpoint rule on a straight segment; exact for P1.
template <class F>
double integrate_segment(F&& f, Vec2 a, Vec2 b) {
  return norm(b - a) * f((a + b) * 0.5);
}

/// Symmetric 3-point rule, barycentric orbit of (2/3, 1/6, 1/6); exact for P2.
template <class F>
double integrate_tri3(F&& f, Vec2 p0, Vec2 p1, Vec2 p2) {
  const double area = std::abs(signed_area(p0, p1, p2));
  const double a = 2.0 / 3.0, b = 1.0 / 6.0;
  Vec2 x1 = p0 * a + p1 * b + p2 * b;
  Vec2 x2 = p0 * b + p1 * a + p2 * b;
  Vec2 x3 = p0 * b + p1 * b + p2 * a;
  return area / 3.0 * (f(x1) + f(x2) + f(x3));
}

/// 4-point Gauss-Legendre on a segment; exact to degree 7. Used for edge
/// degrees of freedom and oracles, not part of the assembly rules.
template <class F>
double integrate_edge_gauss4(F&& f, Vec2 a, Vec2 b) {
  static const double t[2] = {0.3399810435848563, 0.8611363115940526};
  static const double w[2] = {0.6521451548625461, 0.3478548451374538};
  const Vec2 mid = (a + b) * 0.5, half = (b - a) * 0.5;
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    s += w[i] * (f(mid + half * t[i]) + f(mid - half * t[i]));
  return 0.5 * norm(b - a) * s;
}

namespace detail {

struct TriRulePoint {
  double l0, l1, l2, w;  // barycentric coordinates and weight (weights sum to 1)
};

// Symmetric triangle rules (Dunavant); selected by requested polynomial degree.
inline const std::vector<TriRulePoint>& tri_rule(int degree) {
  static const std::vector<TriRulePoint> d2 = {
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
  };
  static const std::vector<TriRulePoint> d4 = [] {
    std::vector<TriRulePoint> r;
    auto orbit3 = [&r](double a, double w) {
      double b = 0.5 * (1.0 - a);
      r.push_back({a, b, b, w});
      r.push_back({b, a, b, w});
      r.push_back({b, b, a, w});
    };
    orbit3(0.108103018168070, 0.223381589678011);
    orbit3(0.816847572980459, 0.109951743655322);
    return r;
  }();
  static const std::vector<TriRulePoint> d6 = [] {
    std::vector<TriRulePoint> r;
    auto orbit3 = [&r](double a, double w) {
      double b = 0.5 * (1.0 - a);
      r.push_back({a, b, b, w});
      r.push_back({b, a, b, w});
      r.push_back({b, b, a, w});
    };
    auto orbit6 = [&r](double a, double b, double w) {
      double c = 1.0 - a - b;
      r.push_back({a, b, c, w});
      r.push_back({a, c, b, w});
      r.push_back({b, a, c, w});
      r.push_back({b, c, a, w});
      r.push_back({c, a, b, w});
      r.push_back({c, b, a, w});
    };
    orbit3(0.873821971016996, 0.050844906370207);
    orbit3(0.501426509658179, 0.116786275726379);
    orbit6(0.636502499121399, 0.310352451033785, 0.082851075618374);
    return r;
  }();
  static const std::vector<TriRulePoint> d8 = [] {
    std::vector<TriRulePoint> r;
    r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.144315607677787});
    auto orbit3 = [&r](double a, double w) {
      double b = 0.5 * (1.0 - a);
      r.push_back({a, b, b, w});
      r.push_back({b, a, b, w});
      r.push_back({b, b, a, w});
    };
    auto orbit6 = [&r](double a, double b, double w) {
      double c = 1.0 - a - b;
      r.push_back({a, b, c, w});
      r.push_back({a, c, b, w});
      r.push_back({b, a, c, w});
      r.push_back({b, c, a, w});
      r.push_back({c, a, b, w});
      r.push_back({c, b, a, w});
    };
    orbit3(0.081414823414554, 0.095091634267285);
    orbit3(0.658861384496480, 0.103217370534718);
    orbit3(0.898905543365938, 0.032458497623198);
    orbit6(0.008394777409958, 0.263112829634638, 0.027230314174435);
    return r;
  }();
  if (degree <= 2) return d2;
  if (degree <= 4) return d4;
  if (degree <= 6) return d6;
  if (degree <= 8) return d8;
  throw ConfigError("tri_rule: degrees above 8 are not provided");
}

}  // namespace detail

/// Reference rule of the requested degree on one triangle.
template <class F>
double integrate_tri_ref(F&& f, Vec2 p0, Vec2 p1, Vec2 p2, int degree) {
  const double area = std::abs(signed_area(p0, p1, p2));
  double s = 0.0;
  for (const auto& q : detail::tri_rule(degree))
    s += q.w * f(p0 * q.l0 + p1 * q.l1 + p2 * q.l2);
  return area * s;
}

/// Fan-triangulated reference rule on a simple polygon with 3 or 4 corners.
/// `pivot` selects the fan corner (used by tests to check fan independence).
template <class F, class Pts>
double integrate_polygon(F&& f, const Pts& poly, int degree, std::size_t pivot = 0) {
  const std::size_t n = std::size(poly);
  if (n < 3) throw ConfigError("integrate_polygon: need at least 3 corners");
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    std::size_t a = pivot, b = (pivot + i) % n, c = (pivot + i + 1) % n;
    s += integrate_tri_ref(f, poly[a], poly[b], poly[c], degree);
  }
  return s;
}

}  // namespace difem
