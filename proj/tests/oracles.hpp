// Independent integration oracles for the test suite. These never go through
// the library quadrature: triangle monomial integrals use the exact
// barycentric factorial formula, segment integrals use closed-form
// antiderivatives.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "difem/common.hpp"

namespace oracles {

using difem::Vec2;

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// int_T lambda0^i lambda1^j lambda2^k dA = 2|T| i! j! k! / (i+j+k+2)!
inline double bary_moment(double area, int i, int j, int k) {
  return 2.0 * area * factorial(i) * factorial(j) * factorial(k) / factorial(i + j + k + 2);
}

inline double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/// Exact integral of x^a y^b over the triangle (p0,p1,p2), by expanding
/// x = sum lambda_i x_i, y = sum lambda_j y_j multinomially.
inline double tri_monomial(Vec2 p0, Vec2 p1, Vec2 p2, int a, int b) {
  const double area = std::abs(difem::signed_area(p0, p1, p2));
  const double xs[3] = {p0.x, p1.x, p2.x};
  const double ys[3] = {p0.y, p1.y, p2.y};
  double total = 0.0;
  // x^a = sum over (i0,i1,i2), y^b = sum over (j0,j1,j2)
  for (int i0 = 0; i0 <= a; ++i0)
    for (int i1 = 0; i1 + i0 <= a; ++i1) {
      const int i2 = a - i0 - i1;
      const double cx = factorial(a) / (factorial(i0) * factorial(i1) * factorial(i2)) *
                        std::pow(xs[0], i0) * std::pow(xs[1], i1) * std::pow(xs[2], i2);
      for (int j0 = 0; j0 <= b; ++j0)
        for (int j1 = 0; j1 + j0 <= b; ++j1) {
          const int j2 = b - j0 - j1;
          const double cy = factorial(b) / (factorial(j0) * factorial(j1) * factorial(j2)) *
                            std::pow(ys[0], j0) * std::pow(ys[1], j1) * std::pow(ys[2], j2);
          total += cx * cy * bary_moment(area, i0 + j0, i1 + j1, i2 + j2);
        }
    }
  return total;
}

/// Exact integral of x^a y^b over a simple polygon, fanned into exact
/// triangle moments.
template <class Pts>
double polygon_monomial(const Pts& poly, int a, int b) {
  double s = 0.0;
  const std::size_t n = std::size(poly);
  for (std::size_t i = 1; i + 1 < n; ++i)
    s += tri_monomial(poly[0], poly[i], poly[i + 1], a, b);
  return s;
}

/// Bivariate polynomial sum c_{ab} x^a y^b up to total degree 2 (or any
/// explicit coefficient list).
struct Poly2 {
  // coefficients for 1, x, y, x^2, xy, y^2
  std::array<double, 6> c{};
  double operator()(Vec2 p) const {
    return c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y +
           c[5] * p.y * p.y;
  }
  double exact_tri(Vec2 p0, Vec2 p1, Vec2 p2) const {
    return c[0] * tri_monomial(p0, p1, p2, 0, 0) + c[1] * tri_monomial(p0, p1, p2, 1, 0) +
           c[2] * tri_monomial(p0, p1, p2, 0, 1) + c[3] * tri_monomial(p0, p1, p2, 2, 0) +
           c[4] * tri_monomial(p0, p1, p2, 1, 1) + c[5] * tri_monomial(p0, p1, p2, 0, 2);
  }
  template <class Pts>
  double exact_polygon(const Pts& poly) const {
    return c[0] * polygon_monomial(poly, 0, 0) + c[1] * polygon_monomial(poly, 1, 0) +
           c[2] * polygon_monomial(poly, 0, 1) + c[3] * polygon_monomial(poly, 2, 0) +
           c[4] * polygon_monomial(poly, 1, 1) + c[5] * polygon_monomial(poly, 0, 2);
  }
};

/// Exact integral of an affine function over the segment [a,b] (trapezoid).
template <class F>
double segment_p1_exact(F&& f, Vec2 a, Vec2 b) {
  return 0.5 * difem::norm(b - a) * (f(a) + f(b));
}

/// Exact integral of a quadratic-along-the-segment function (Simpson).
template <class F>
double segment_p2_exact(F&& f, Vec2 a, Vec2 b) {
  return difem::norm(b - a) / 6.0 * (f(a) + 4.0 * f((a + b) * 0.5) + f(b));
}

}  // namespace oracles
