#ifndef OPENWALK_SENSORS_HPP
#define OPENWALK_SENSORS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "openwalk/geometry.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

using Rng = std::mt19937_64;

// --- scene snapshot and ray casting ------------------------------------------

/// World frozen at one instant: dynamic agents resolved to positions.
struct Scene {
  const World* world = nullptr;
  double time = 0.0;
  std::vector<DynamicState> dynamics;
};

inline Scene make_scene(const World& w, double t) { return {&w, t, dynamic_positions(w, t)}; }

enum class HitKind { Obstacle, Dynamic, Terrain };

struct RayHit {
  double distance = 0.0;
  HitKind kind = HitKind::Terrain;
  std::size_t index = 0;  // into world.obstacles or scene.dynamics
};

/// First solid terrain cell (ObstacleFixed, OffMap, or outside the grid) along
/// the ray, by grid traversal.
inline std::optional<double> ray_terrain(const SemanticGrid& grid, const Vec2& origin,
                                         const Vec2& dir, double max_range) {
  const double res = grid.resolution();
  const double gx = (origin.x - grid.origin().x) / res;
  const double gy = (origin.y - grid.origin().y) / res;
  Cell cell{static_cast<int>(std::floor(gx)), static_cast<int>(std::floor(gy))};
  if (is_solid(grid.at(cell))) return 0.0;

  const int step_x = dir.x > 0.0 ? 1 : (dir.x < 0.0 ? -1 : 0);
  const int step_y = dir.y > 0.0 ? 1 : (dir.y < 0.0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Parametric distances in grid units.
  double t_max_x = step_x > 0 ? (cell.x + 1 - gx) / dir.x
                   : step_x < 0 ? (gx - cell.x) / -dir.x
                                : kInf;
  double t_max_y = step_y > 0 ? (cell.y + 1 - gy) / dir.y
                   : step_y < 0 ? (gy - cell.y) / -dir.y
                                : kInf;
  const double t_delta_x = step_x != 0 ? 1.0 / std::abs(dir.x) : kInf;
  const double t_delta_y = step_y != 0 ? 1.0 / std::abs(dir.y) : kInf;
  const double limit = max_range / res;

  while (true) {
    double t_entry;
    if (t_max_x < t_max_y) {
      t_entry = t_max_x;
      t_max_x += t_delta_x;
      cell.x += step_x;
    } else {
      t_entry = t_max_y;
      t_max_y += t_delta_y;
      cell.y += step_y;
    }
    if (t_entry > limit) return std::nullopt;
    if (is_solid(grid.at(cell))) return t_entry * res;
  }
}

inline std::optional<double> ray_shape(const Vec2& origin, const Vec2& dir, const Shape& shape) {
  if (const auto* d = std::get_if<Disc>(&shape)) return ray_disc(origin, dir, *d);
  return ray_rect(origin, dir, std::get<Rect>(shape));
}

/// Nearest hit among obstacles, dynamic agents and solid terrain.
inline std::optional<RayHit> cast_ray(const Scene& scene, const Vec2& origin, double angle,
                                      double max_range) {
  const Vec2 dir = unit_vector(angle);
  std::optional<RayHit> best;
  auto offer = [&](std::optional<double> d, HitKind kind, std::size_t idx) {
    if (d && *d <= max_range && (!best || *d < best->distance)) best = RayHit{*d, kind, idx};
  };
  const auto& w = *scene.world;
  for (std::size_t i = 0; i < w.obstacles.size(); ++i)
    offer(ray_shape(origin, dir, w.obstacles[i].shape), HitKind::Obstacle, i);
  for (std::size_t i = 0; i < scene.dynamics.size(); ++i)
    offer(ray_disc(origin, dir, {scene.dynamics[i].center, scene.dynamics[i].radius}),
          HitKind::Dynamic, i);
  const double terrain_limit = best ? best->distance : max_range;
  offer(ray_terrain(w.grid, origin, dir, terrain_limit), HitKind::Terrain, 0);
  return best;
}

// --- depth camera ---------------------------------------------------------------

struct CameraParams {
  int width = 64;
  int height = 40;
  double fov = 1.518;  // horizontal, radians
  double min_range = 0.3;
  double max_range = 6.0;

  bool valid() const {
    return width > 0 && height > 0 && fov > 0.0 && fov < 2.0 * kPi && min_range > 0.0 &&
           max_range > min_range;
  }

  /// Body-frame bearing of a pixel column's center; column 0 is leftmost.
  double column_bearing(double col) const { return fov * (0.5 - (col + 0.5) / width); }
  /// Fractional column whose center looks along the bearing.
  double bearing_to_column(double bearing) const { return (0.5 - bearing / fov) * width - 0.5; }
};

struct DepthImage {
  CameraParams camera;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  DepthImage() = default;
  explicit DepthImage(const CameraParams& cam)
      : camera(cam),
        values(static_cast<std::size_t>(cam.width) * cam.height, 0.0),
        valid(static_cast<std::size_t>(cam.width) * cam.height, 0) {}

  int width() const { return camera.width; }
  int height() const { return camera.height; }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * camera.width + static_cast<std::size_t>(col);
  }
  bool is_valid(int col, int row) const { return valid[index(col, row)] != 0; }
  double at(int col, int row) const { return values[index(col, row)]; }
  void set(int col, int row, double v) {
    values[index(col, row)] = v;
    valid[index(col, row)] = 1;
  }
  void invalidate(int col, int row) { valid[index(col, row)] = 0; }
  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid) n += v;
    return n;
  }

  bool operator==(const DepthImage& o) const {
    if (valid != o.valid || camera.width != o.camera.width || camera.height != o.camera.height)
      return false;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (valid[i] && values[i] != o.values[i]) return false;
    return true;
  }
};

struct DepthNoiseModel {
  double dropout = 0.0;  // per-pixel invalidation probability
  int holes = 0;         // contiguous invalid blobs per frame
  int hole_radius = 3;   // px

  bool active() const { return dropout > 0.0 || holes > 0; }
};

/// Marks dropout pixels and hole blobs invalid; never creates values.
inline void corrupt_depth(DepthImage& img, const DepthNoiseModel& noise, Rng& rng) {
  if (noise.dropout > 0.0) {
    std::bernoulli_distribution drop(std::min(noise.dropout, 1.0));
    for (auto& v : img.valid)
      if (drop(rng)) v = 0;
  }
  if (noise.holes > 0) {
    std::uniform_int_distribution<int> col(0, img.width() - 1);
    std::uniform_int_distribution<int> row(0, img.height() - 1);
    const int r = noise.hole_radius;
    for (int h = 0; h < noise.holes; ++h) {
      const int cc = col(rng);
      const int cr = row(rng);
      for (int y = std::max(0, cr - r); y <= std::min(img.height() - 1, cr + r); ++y)
        for (int x = std::max(0, cc - r); x <= std::min(img.width() - 1, cc + r); ++x)
          if ((x - cc) * (x - cc) + (y - cr) * (y - cr) <= r * r) img.invalidate(x, y);
    }
  }
}

/// Planar scanline camera: each column casts one ray and every row of the
/// column repeats its range.
inline DepthImage render_depth(const Scene& scene, const Pose& pose, const CameraParams& cam,
                               const DepthNoiseModel& noise, Rng& rng) {
  DepthImage img(cam);
  for (int c = 0; c < cam.width; ++c) {
    const double angle = pose.heading + cam.column_bearing(c);
    const auto hit = cast_ray(scene, pose.position, angle, cam.max_range);
    if (!hit || hit->distance < cam.min_range) continue;
    for (int r = 0; r < cam.height; ++r) img.set(c, r, hit->distance);
  }
  corrupt_depth(img, noise, rng);
  return img;
}

inline DepthImage render_depth(const World& w, const Pose& pose, const CameraParams& cam, double t,
                               const DepthNoiseModel& noise, Rng& rng) {
  return render_depth(make_scene(w, t), pose, cam, noise, rng);
}

// --- ultrasonic array ---------------------------------------------------------

inline constexpr int kUltrasonicCount = 5;

struct UltrasonicArray {
  std::array<double, kUltrasonicCount> headings{deg_to_rad(-60.0), deg_to_rad(-30.0), 0.0,
                                                deg_to_rad(30.0), deg_to_rad(60.0)};
  double half_angle = deg_to_rad(15.0);
  double max_range = 4.0;

  bool valid() const { return half_angle > 0.0 && half_angle < deg_to_rad(45.0) && max_range > 0.0; }
};

struct UltrasonicReading {
  std::array<std::optional<double>, kUltrasonicCount> distance;  // nullopt = no echo
  bool operator==(const UltrasonicReading&) const = default;
};

/// Boundary-inclusive cone membership.
inline bool in_cone(double bearing, double cone_center, double half_angle) {
  return std::abs(wrap_angle(bearing - cone_center)) <= half_angle + 1e-12;
}

inline constexpr double kMinEcho = 1e-3;

/// Distance from origin to the nearest point of the shape whose bearing lies in
/// the cone. The set shape-within-cone is convex, so its nearest point is the
/// shape's own nearest point when that lies in the cone, otherwise it sits on
/// one of the two cone edges.
inline std::optional<double> cone_distance(const Vec2& origin, double cone_center,
                                           double half_angle, const Shape& shape) {
  Vec2 nearest;
  double d_nearest;
  if (const auto* d = std::get_if<Disc>(&shape)) {
    const double dc = distance(origin, d->center);
    if (dc <= d->radius) return kMinEcho;
    nearest = d->center;
    d_nearest = dc - d->radius;
  } else {
    const auto& r = std::get<Rect>(shape);
    nearest = r.closest_point(origin);
    d_nearest = distance(origin, nearest);
    if (d_nearest == 0.0) return kMinEcho;
  }
  if (in_cone(bearing_to(origin, nearest), cone_center, half_angle))
    return std::max(d_nearest, kMinEcho);
  std::optional<double> best;
  for (double edge : {cone_center - half_angle, cone_center + half_angle}) {
    const auto hit = ray_shape(origin, unit_vector(edge), shape);
    if (hit && (!best || *hit < *best)) best = std::max(*hit, kMinEcho);
  }
  return best;
}

inline UltrasonicReading ping_ultrasonic(const Scene& scene, const Pose& pose,
                                         const UltrasonicArray& array) {
  UltrasonicReading out;
  const auto& w = *scene.world;
  for (int s = 0; s < kUltrasonicCount; ++s) {
    const double center = pose.heading + array.headings[static_cast<std::size_t>(s)];
    std::optional<double> best;
    auto offer = [&](std::optional<double> d) {
      if (d && (!best || *d < *best)) best = d;
    };
    for (const auto& o : w.obstacles)
      offer(cone_distance(pose.position, center, array.half_angle, o.shape));
    for (const auto& a : scene.dynamics)
      offer(cone_distance(pose.position, center, array.half_angle, Disc{a.center, a.radius}));
    if (best && *best <= array.max_range) out.distance[static_cast<std::size_t>(s)] = best;
  }
  return out;
}

inline UltrasonicReading ping_ultrasonic(const World& w, const Pose& pose,
                                         const UltrasonicArray& array, double t) {
  return ping_ultrasonic(make_scene(w, t), pose, array);
}

// --- GPS and IMU ----------------------------------------------------------------

struct GpsFix {
  Vec2 position;
  double sigma = 0.0;
};

inline GpsFix sample_gps(const Vec2& truth, double sigma, Rng& rng) {
  if (sigma <= 0.0) return {truth, 0.0};
  std::normal_distribution<double> n(0.0, sigma);
  const double dx = n(rng);
  const double dy = n(rng);
  return {{truth.x + dx, truth.y + dy}, sigma};
}

struct KinematicState {
  Pose pose;
  double speed = 0.0;         // m/s
  double angular_rate = 0.0;  // rad/s, CCW positive
};

struct ImuSample {
  double heading = 0.0;
  double angular_rate = 0.0;
  double speed = 0.0;
};

inline ImuSample sample_imu(const KinematicState& s) {
  return {wrap_angle(s.pose.heading), s.angular_rate, s.speed};
}

/// Optional noisy variant: Gaussian heading noise only.
inline ImuSample sample_imu(const KinematicState& s, double heading_sigma, Rng& rng) {
  ImuSample out = sample_imu(s);
  if (heading_sigma > 0.0)
    out.heading = wrap_angle(out.heading + std::normal_distribution<double>(0.0, heading_sigma)(rng));
  return out;
}

}  // namespace openwalk

#endif  // OPENWALK_SENSORS_HPP
