#ifndef OPENWALK_WORLD_HPP
#define OPENWALK_WORLD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "openwalk/error.hpp"
#include "openwalk/geometry.hpp"

namespace openwalk {

enum class SemanticClass : std::uint8_t {
  BlindTrack,
  Sidewalk,
  ZebraCrossing,
  Roadway,
  ObstacleFixed,
  OffMap,
};

inline constexpr int kSemanticClassCount = 6;

inline constexpr bool is_walkable(SemanticClass c) {
  return c == SemanticClass::BlindTrack || c == SemanticClass::Sidewalk ||
         c == SemanticClass::ZebraCrossing;
}

/// Solid for rays and body motion.
inline constexpr bool is_solid(SemanticClass c) {
  return c == SemanticClass::ObstacleFixed || c == SemanticClass::OffMap;
}

inline constexpr char class_to_char(SemanticClass c) {
  switch (c) {
    case SemanticClass::BlindTrack: return 'B';
    case SemanticClass::Sidewalk: return 'S';
    case SemanticClass::ZebraCrossing: return 'Z';
    case SemanticClass::Roadway: return 'R';
    case SemanticClass::ObstacleFixed: return 'X';
    case SemanticClass::OffMap: return '.';
  }
  return '.';
}

inline constexpr std::optional<SemanticClass> class_from_char(char ch) {
  switch (ch) {
    case 'B': return SemanticClass::BlindTrack;
    case 'S': return SemanticClass::Sidewalk;
    case 'Z': return SemanticClass::ZebraCrossing;
    case 'R': return SemanticClass::Roadway;
    case 'X': return SemanticClass::ObstacleFixed;
    case '.': return SemanticClass::OffMap;
    default: return std::nullopt;
  }
}

struct Cell {
  int x = 0;
  int y = 0;
  constexpr bool operator==(const Cell&) const = default;
  constexpr auto operator<=>(const Cell&) const = default;
};

/// Row-major raster of terrain classes; cell (0,0) covers
/// [origin, origin + resolution) on both axes.
class SemanticGrid {
 public:
  SemanticGrid() = default;
  SemanticGrid(int width, int height, double resolution, Vec2 origin,
               SemanticClass fill = SemanticClass::OffMap)
      : width_(width), height_(height), resolution_(resolution), origin_(origin),
        cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width <= 0 || height <= 0) throw ValidationError("grid: width and height must be positive");
    if (!(resolution > 0.0)) throw ValidationError("grid: resolution must be > 0");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<SemanticClass>& cells() const { return cells_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  SemanticClass at(Cell c) const {
    return in_bounds(c) ? cells_[index(c)] : SemanticClass::OffMap;
  }
  void set(Cell c, SemanticClass v) { cells_[index(c)] = v; }

  /// Cell containing a world point; may lie out of bounds.
  Cell cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
            static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
  }
  Vec2 center_of(Cell c) const {
    return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
  }
  SemanticClass class_at(const Vec2& p) const { return at(cell_of(p)); }

  /// Paints every cell whose center lies inside the rectangle.
  void paint(const Rect& r, SemanticClass v) {
    const Cell lo = cell_of(r.min);
    const Cell hi = cell_of(r.max);
    for (int y = std::max(lo.y, 0); y <= std::min(hi.y, height_ - 1); ++y)
      for (int x = std::max(lo.x, 0); x <= std::min(hi.x, width_ - 1); ++x)
        if (r.contains(center_of({x, y}))) set({x, y}, v);
  }

  bool operator==(const SemanticGrid&) const = default;

 private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.1;
  Vec2 origin_{};
  std::vector<SemanticClass> cells_;
};

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians, CCW from +x, kept in (-pi, pi]
  bool operator==(const Pose&) const = default;
};

using Shape = std::variant<Disc, Rect>;

struct ObstacleSpec {
  std::string id;
  Shape shape;
  std::string label;
};

struct DynamicAgentSpec {
  std::string id;
  std::string label;
  double radius = 0.3;
  std::vector<Vec2> path;
  double speed = 0.0;
  double start_time = 0.0;
  bool loop = false;
};

struct TrafficLight {
  std::string id;
  Rect zebra;
  double green = 60.0;
  double red = 30.0;
  double offset = 0.0;
  std::optional<Vec2> signal;  // signal head; defaults to the zebra center

  Vec2 signal_position() const { return signal.value_or(zebra.center()); }
};

enum class LightPhase { Green, Red };

struct World {
  SemanticGrid grid;
  std::vector<ObstacleSpec> obstacles;
  std::vector<DynamicAgentSpec> dynamics;
  std::vector<TrafficLight> lights;
  Pose start;
  Vec2 goal;
};

inline bool operator==(const ObstacleSpec& a, const ObstacleSpec& b) {
  return a.id == b.id && a.shape == b.shape && a.label == b.label;
}
inline bool operator==(const DynamicAgentSpec& a, const DynamicAgentSpec& b) {
  return a.id == b.id && a.label == b.label && a.radius == b.radius && a.path == b.path &&
         a.speed == b.speed && a.start_time == b.start_time && a.loop == b.loop;
}
inline bool operator==(const TrafficLight& a, const TrafficLight& b) {
  return a.id == b.id && a.zebra == b.zebra && a.green == b.green && a.red == b.red &&
         a.offset == b.offset && a.signal == b.signal;
}
inline bool operator==(const World& a, const World& b) {
  return a.grid == b.grid && a.obstacles == b.obstacles && a.dynamics == b.dynamics &&
         a.lights == b.lights && a.start == b.start && a.goal == b.goal;
}

/// Throws ValidationError naming the offending entity.
inline void validate(const World& w) {
  if (w.grid.size() != static_cast<std::size_t>(w.grid.width()) * w.grid.height() ||
      w.grid.size() == 0)
    throw ValidationError("grid: width*height does not match cell count");
  std::set<std::string> ids;
  auto claim = [&](const std::string& kind, const std::string& id) {
    if (id.empty()) throw ValidationError(kind + ": empty id");
    if (!ids.insert(id).second) throw ValidationError(kind + " '" + id + "': duplicate id");
  };
  for (const auto& o : w.obstacles) {
    claim("obstacle", o.id);
    if (const auto* d = std::get_if<Disc>(&o.shape)) {
      if (!(d->radius > 0.0)) throw ValidationError("obstacle '" + o.id + "': radius must be > 0");
    } else {
      const auto& r = std::get<Rect>(o.shape);
      if (!(r.min.x < r.max.x && r.min.y < r.max.y))
        throw ValidationError("obstacle '" + o.id + "': rect min must be < max");
    }
  }
  for (const auto& d : w.dynamics) {
    claim("dynamic", d.id);
    if (!(d.radius > 0.0)) throw ValidationError("dynamic '" + d.id + "': radius must be > 0");
    if (!(d.speed >= 0.0)) throw ValidationError("dynamic '" + d.id + "': speed must be >= 0");
    if (d.path.empty()) throw ValidationError("dynamic '" + d.id + "': path needs >= 1 point");
    if (d.start_time < 0.0) throw ValidationError("dynamic '" + d.id + "': start must be >= 0");
  }
  for (const auto& l : w.lights) {
    claim("light", l.id);
    if (!(l.green > 0.0) || !(l.red > 0.0))
      throw ValidationError("light '" + l.id + "': green and red must be > 0");
    if (!(l.zebra.min.x < l.zebra.max.x && l.zebra.min.y < l.zebra.max.y))
      throw ValidationError("light '" + l.id + "': zebra min must be < max");
  }
  if (!is_walkable(w.grid.class_at(w.start.position)))
    throw ValidationError("start not walkable");
  if (!is_walkable(w.grid.class_at(w.goal))) throw ValidationError("goal not walkable");
}

// --- time-indexed queries ---------------------------------------------------

inline LightPhase light_phase(const TrafficLight& light, double t) {
  const double cycle = light.green + light.red;
  double m = std::fmod(t - light.offset, cycle);
  if (m < 0.0) m += cycle;
  if (m >= cycle) m -= cycle;
  return m < light.green ? LightPhase::Green : LightPhase::Red;
}

/// End of the green window containing t, or nullopt when t is red.
inline std::optional<double> green_window_end(const TrafficLight& light, double t) {
  const double cycle = light.green + light.red;
  double m = std::fmod(t - light.offset, cycle);
  if (m < 0.0) m += cycle;
  if (m >= light.green) return std::nullopt;
  return t - m + light.green;
}

struct DynamicState {
  std::string id;
  Vec2 center;
  double radius = 0.0;
  std::string label;
};

inline double polyline_length(const std::vector<Vec2>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
  return len;
}

/// Point at arc length s along the polyline, clamped to its ends.
inline Vec2 point_along(const std::vector<Vec2>& path, double s) {
  if (s <= 0.0) return path.front();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = distance(path[i - 1], path[i]);
    if (s <= seg && seg > 0.0) return path[i - 1] + (path[i] - path[i - 1]) * (s / seg);
    s -= seg;
  }
  return path.back();
}

/// Looping agents walk the path forward then back (ping-pong).
inline Vec2 dynamic_position(const DynamicAgentSpec& a, double t) {
  const double len = polyline_length(a.path);
  if (t <= a.start_time || len == 0.0 || a.speed == 0.0) return a.path.front();
  double s = a.speed * (t - a.start_time);
  if (a.loop) {
    s = std::fmod(s, 2.0 * len);
    if (s > len) s = 2.0 * len - s;
  }
  return point_along(a.path, s);
}

inline std::vector<DynamicState> dynamic_positions(const World& w, double t) {
  std::vector<DynamicState> out;
  out.reserve(w.dynamics.size());
  for (const auto& a : w.dynamics) out.push_back({a.id, dynamic_position(a, t), a.radius, a.label});
  return out;
}

struct ContactReport {
  std::vector<std::string> ids;
  bool empty() const { return ids.empty(); }
};

inline bool disc_overlaps(const Vec2& c, double r, const Shape& shape) {
  if (const auto* d = std::get_if<Disc>(&shape)) return distance(c, d->center) < r + d->radius;
  return std::get<Rect>(shape).distance_to(c) < r;
}

inline ContactReport collision_check_static(const Vec2& center, double radius, const World& w) {
  ContactReport rep;
  for (const auto& o : w.obstacles)
    if (disc_overlaps(center, radius, o.shape)) rep.ids.push_back(o.id);
  return rep;
}

/// Strict overlap: touching surfaces are not a contact.
inline ContactReport collision_check(const Vec2& center, double radius, const World& w, double t) {
  ContactReport rep = collision_check_static(center, radius, w);
  for (const auto& a : w.dynamics)
    if (distance(center, dynamic_position(a, t)) < radius + a.radius) rep.ids.push_back(a.id);
  return rep;
}

}  // namespace openwalk

#endif  // OPENWALK_WORLD_HPP
