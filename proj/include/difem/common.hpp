#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace difem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { double n = norm(a); return {a.x / n, a.y / n}; }
// counterclockwise rotation by 90 degrees
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline double signed_area(Vec2 p0, Vec2 p1, Vec2 p2) {
  return 0.5 * cross(p1 - p0, p2 - p0);
}

// shoelace signed area of a simple polygon
template <class Pts>
double polygon_area(const Pts& p) {
  double a = 0.0;
  const std::size_t n = std::size(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q0 = p[i];
    const auto& q1 = p[(i + 1) % n];
    a += cross(q0, q1);
  }
  return 0.5 * a;
}

template <class Pts>
Vec2 polygon_centroid(const Pts& p) {
  double a = 0.0;
  Vec2 c{0.0, 0.0};
  const std::size_t n = std::size(p);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 q0 = p[i], q1 = p[(i + 1) % n];
    double w = cross(q0, q1);
    a += w;
    c += (q0 + q1) * w;
  }
  return c / (3.0 * a);
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InterfaceResolutionError : Error { using Error::Error; };
struct NoSignChangeError : Error { using Error::Error; };
struct NonConvergenceError : Error { using Error::Error; };
struct DegenerateCutError : Error { using Error::Error; };
struct PatchError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct FieldUndefinedError : Error { using Error::Error; };
struct AssemblyError : Error { using Error::Error; };
struct SingularSystemError : Error { using Error::Error; };
struct UnknownExampleError : Error { using Error::Error; };
struct ResourceError : Error { using Error::Error; };

}  // namespace difem
