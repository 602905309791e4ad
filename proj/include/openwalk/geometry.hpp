#ifndef OPENWALK_GEOMETRY_HPP
#define OPENWALK_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace openwalk {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double bearing_to(const Vec2& from, const Vec2& to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

struct Disc {
  Vec2 center;
  double radius = 0.0;
  constexpr bool operator==(const Disc&) const = default;
};

/// Axis-aligned rectangle, min < max componentwise.
struct Rect {
  Vec2 min;
  Vec2 max;

  constexpr bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  constexpr Vec2 center() const { return {(min.x + max.x) * 0.5, (min.y + max.y) * 0.5}; }
  Vec2 closest_point(const Vec2& p) const {
    return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
  }
  double distance_to(const Vec2& p) const { return distance(p, closest_point(p)); }
  constexpr bool operator==(const Rect&) const = default;
};

// Ray-shape entry distances. The ray is origin + s * dir with |dir| == 1 and
// s >= 0. An origin inside the shape yields 0.

inline std::optional<double> ray_disc(const Vec2& origin, const Vec2& dir, const Disc& disc) {
  const Vec2 oc = origin - disc.center;
  const double c = oc.dot(oc) - disc.radius * disc.radius;
  if (c <= 0.0) return 0.0;
  const double b = oc.dot(dir);
  if (b >= 0.0) return std::nullopt;
  const double disc_sq = b * b - c;
  if (disc_sq < 0.0) return std::nullopt;
  return -b - std::sqrt(disc_sq);
}

inline std::optional<double> ray_rect(const Vec2& origin, const Vec2& dir, const Rect& rect) {
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double lo[2] = {rect.min.x, rect.min.y};
  const double hi[2] = {rect.max.x, rect.max.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  return t_near;
}

/// Segment-rectangle intersection test (inclusive).
inline bool segment_hits_rect(const Vec2& a, const Vec2& b, const Rect& rect) {
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len == 0.0) return rect.contains(a);
  const auto t = ray_rect(a, d * (1.0 / len), rect);
  return t && *t <= len;
}

}  // namespace openwalk

#endif  // OPENWALK_GEOMETRY_HPP
