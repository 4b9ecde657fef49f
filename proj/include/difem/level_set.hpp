#pragma once

#include <functional>
#include <sstream>

#include "difem/common.hpp"

namespace difem {

/// Scalar level set describing the interface. Sign convention throughout:
/// phi > 0 inside Omega^- (the mixed-form subdomain), phi < 0 inside Omega^+.
struct LevelSet {
  std::string name;
  std::function<double(Vec2)> phi;

  double operator()(Vec2 p) const { return phi(p); }
};

inline LevelSet level_set_affine(double nx, double ny, double offset) {
  std::ostringstream os;
  os << "affine:" << nx << "," << ny << "," << offset;
  return {os.str(), [=](Vec2 p) { return nx * p.x + ny * p.y + offset; }};
}

inline LevelSet level_set_circle(Vec2 center, double radius) {
  return {"circle", [=](Vec2 p) {
            Vec2 d = p - center;
            return radius * radius - dot(d, d);
          }};
}

/// Omega^- is the union of the two disk interiors.
inline LevelSet level_set_two_circles(Vec2 c1, Vec2 c2, double radius) {
  return {"two-circles", [=](Vec2 p) {
            Vec2 d1 = p - c1, d2 = p - c2;
            double a = dot(d1, d1) - radius * radius;
            double b = dot(d2, d2) - radius * radius;
            return -a * b;
          }};
}

/// Interface y = 0.5 + 0.2 sin(pi x); Omega^- is the region above it.
inline LevelSet level_set_sinusoidal() {
  return {"sinusoidal", [](Vec2 p) {
            return p.y - 0.5 - 0.2 * std::sin(M_PI * p.x);
          }};
}

/// Five-petal flower r = 1/2 - 2^(sin(5 theta) - 3); Omega^- is the enclosed
/// region. Evaluated with atan2; the value at the origin is the continuous
/// limit (positive, well inside Omega^-).
inline LevelSet level_set_flower() {
  return {"flower", [](Vec2 p) {
            double r = norm(p);
            double th = std::atan2(p.y, p.x);
            return 0.5 - std::exp2(std::sin(5.0 * th) - 3.0) - r;
          }};
}

/// Parse "affine:nx,ny,offset", "circle:cx,cy,r", or a named builtin.
inline LevelSet parse_level_set(const std::string& s) {
  auto split_args = [](const std::string& a) {
    std::vector<double> vals;
    std::istringstream is(a);
    std::string tok;
    while (std::getline(is, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
  };
  if (s.rfind("affine:", 0) == 0) {
    auto v = split_args(s.substr(7));
    if (v.size() != 3) throw ConfigError("affine level set needs nx,ny,offset");
    return level_set_affine(v[0], v[1], v[2]);
  }
  if (s.rfind("circle:", 0) == 0) {
    auto v = split_args(s.substr(7));
    if (v.size() != 3) throw ConfigError("circle level set needs cx,cy,r");
    return level_set_circle({v[0], v[1]}, v[2]);
  }
  if (s == "sinusoidal") return level_set_sinusoidal();
  if (s == "flower") return level_set_flower();
  throw ConfigError("unknown level set: " + s);
}

}  // namespace difem
