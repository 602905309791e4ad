#ifndef OPENWALK_PERCEPTION_HPP
#define OPENWALK_PERCEPTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "openwalk/sensors.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

// --- detection classes -----------------------------------------------------------

enum class DetectClass : std::uint8_t {
  Person,
  Car,
  Bicycle,
  Bus,
  Motorbike,
  TrafficSign,
  TrafficLight,
  Unknown,
};

inline constexpr int kDetectableClassCount = 7;

inline constexpr std::string_view detect_class_name(DetectClass c) {
  switch (c) {
    case DetectClass::Person: return "person";
    case DetectClass::Car: return "car";
    case DetectClass::Bicycle: return "bicycle";
    case DetectClass::Bus: return "bus";
    case DetectClass::Motorbike: return "motorbike";
    case DetectClass::TrafficSign: return "traffic_sign";
    case DetectClass::TrafficLight: return "traffic_light";
    case DetectClass::Unknown: return "unknown";
  }
  return "unknown";
}

/// Entity labels outside the seven detectable classes map to Unknown.
inline DetectClass detect_class_from_label(std::string_view label) {
  for (int i = 0; i < kDetectableClassCount; ++i) {
    const auto c = static_cast<DetectClass>(i);
    if (label == detect_class_name(c)) return c;
  }
  if (label == "traffic sign") return DetectClass::TrafficSign;
  if (label == "traffic light") return DetectClass::TrafficLight;
  return DetectClass::Unknown;
}

struct PerceptionConfig {
  double mislabel_rate = 0.05;
  std::array<double, kDetectableClassCount> miss_rate{0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05};
  double max_range = 6.0;
  double bearing_tolerance = deg_to_rad(10.0);
  double inner_fraction = 0.5;
  double min_valid_fraction = 0.3;
  double window_half_extent = 5.0;

  double miss_rate_for(DetectClass c) const {
    return c == DetectClass::Unknown ? 1.0 : miss_rate[static_cast<std::size_t>(c)];
  }
};

// --- depth completion --------------------------------------------------------------

/// Dense fill by repeated passes: each pass turns every invalid pixel with a
/// valid 8-neighbor into the minimum of those neighbors, using only values
/// valid at the start of the pass. Returns nullopt when no pixel is valid.
inline std::optional<DepthImage> complete_depth(const DepthImage& image) {
  if (image.valid_count() == 0) return std::nullopt;
  DepthImage out = image;
  const int w = out.width();
  const int h = out.height();
  std::vector<std::pair<std::size_t, double>> fills;
  while (true) {
    fills.clear();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (out.is_valid(x, y)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (out.is_valid(nx, ny)) best = std::min(best, out.at(nx, ny));
          }
        }
        if (best != std::numeric_limits<double>::infinity()) fills.emplace_back(out.index(x, y), best);
      }
    }
    if (fills.empty()) break;
    for (const auto& [idx, v] : fills) {
      out.values[idx] = v;
      out.valid[idx] = 1;
    }
  }
  return out;
}

// --- semantic observation ------------------------------------------------------------

/// Square window of observed classes aligned to the world grid and centered on
/// the agent's cell.
struct SemanticObservation {
  Cell center;       // world cell of the agent
  int half_cells = 0;
  double resolution = 0.1;
  Vec2 grid_origin;  // world origin of the source grid
  std::vector<SemanticClass> cells;

  int size() const { return 2 * half_cells + 1; }
  Cell world_cell(Cell local) const {
    return {center.x - half_cells + local.x, center.y - half_cells + local.y};
  }
  Cell local_cell(Cell world) const {
    return {world.x - center.x + half_cells, world.y - center.y + half_cells};
  }
  bool contains_local(Cell l) const { return l.x >= 0 && l.y >= 0 && l.x < size() && l.y < size(); }
  Vec2 center_of(Cell local) const {
    const Cell wc = world_cell(local);
    return {grid_origin.x + (wc.x + 0.5) * resolution, grid_origin.y + (wc.y + 0.5) * resolution};
  }
  SemanticClass at(Cell local) const {
    return cells[static_cast<std::size_t>(local.y) * size() + local.x];
  }
};

inline constexpr std::array<SemanticClass, 4> kSegmentationLabels{
    SemanticClass::BlindTrack, SemanticClass::Sidewalk, SemanticClass::ZebraCrossing,
    SemanticClass::Roadway};

/// A replacement label drawn uniformly from the segmentation label set,
/// excluding the true class.
inline SemanticClass mislabel(SemanticClass truth, Rng& rng) {
  std::array<SemanticClass, 4> options{};
  int n = 0;
  for (auto c : kSegmentationLabels)
    if (c != truth) options[static_cast<std::size_t>(n++)] = c;
  return options[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))];
}

inline SemanticObservation observe_semantics(const World& w, const Pose& pose,
                                             const PerceptionConfig& cfg, Rng& rng) {
  SemanticObservation obs;
  obs.center = w.grid.cell_of(pose.position);
  obs.resolution = w.grid.resolution();
  obs.grid_origin = w.grid.origin();
  obs.half_cells = static_cast<int>(std::lround(cfg.window_half_extent / obs.resolution));
  const int n = obs.size();
  obs.cells.resize(static_cast<std::size_t>(n) * n);
  std::bernoulli_distribution flip(std::clamp(cfg.mislabel_rate, 0.0, 1.0));
  const bool noisy = cfg.mislabel_rate > 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      SemanticClass c = w.grid.at(obs.world_cell({x, y}));
      if (noisy && flip(rng)) c = mislabel(c, rng);
      obs.cells[static_cast<std::size_t>(y) * n + x] = c;
    }
  }
  return obs;
}

// --- object detection ------------------------------------------------------------------

struct Detection {
  DetectClass cls = DetectClass::Unknown;
  int col_min = 0;
  int col_max = 0;
  double bearing = 0.0;  // body frame, ray through the interval's center column
  double confidence = 1.0;
  std::optional<LightPhase> phase;  // traffic lights only
  std::string entity_id;
};

/// Column interval whose pixel centers look into [lo, hi] (body-frame
/// bearings); falls back to the single column nearest `mid`.
inline std::pair<int, int> project_interval(const CameraParams& cam, double lo, double hi,
                                            double mid) {
  int first = static_cast<int>(std::ceil(cam.bearing_to_column(hi) - 1e-9));
  int last = static_cast<int>(std::floor(cam.bearing_to_column(lo) + 1e-9));
  first = std::max(first, 0);
  last = std::min(last, cam.width - 1);
  if (first > last) {
    const int c = std::clamp(static_cast<int>(std::lround(cam.bearing_to_column(mid))), 0,
                             cam.width - 1);
    return {c, c};
  }
  return {first, last};
}

namespace detail {

/// Relative angular extent [lo, hi] of a shape around `center_bearing`.
inline std::pair<double, double> angular_extent(const Vec2& origin, double center_bearing,
                                                double range, const Shape& shape) {
  if (const auto* d = std::get_if<Disc>(&shape)) {
    const double half = range > d->radius ? std::atan(d->radius / range) : kPi / 2.0;
    return {-half, half};
  }
  const auto& r = std::get<Rect>(shape);
  if (r.contains(origin)) return {-kPi / 2.0, kPi / 2.0};
  double lo = 0.0;
  double hi = 0.0;
  for (const Vec2& corner : {r.min, r.max, Vec2{r.min.x, r.max.y}, Vec2{r.max.x, r.min.y}}) {
    const double rel = wrap_angle(bearing_to(origin, corner) - center_bearing);
    lo = std::min(lo, rel);
    hi = std::max(hi, rel);
  }
  return {lo, hi};
}

}  // namespace detail

inline std::vector<Detection> detect_objects(const Scene& scene, const Pose& pose,
                                             const CameraParams& cam, const PerceptionConfig& cfg,
                                             Rng& rng) {
  std::vector<Detection> out;
  const auto& w = *scene.world;

  auto consider = [&](const std::string& id, const std::string& label, const Shape& shape,
                      const Vec2& center, HitKind kind, std::size_t index) {
    const DetectClass cls = detect_class_from_label(label);
    if (cls == DetectClass::Unknown || cls == DetectClass::TrafficLight) return;
    const double range = distance(pose.position, center);
    const double world_bearing = bearing_to(pose.position, center);
    const double rel = wrap_angle(world_bearing - pose.heading);
    if (std::abs(rel) > cam.fov / 2.0 || range > cfg.max_range) return;
    const auto hit = cast_ray(scene, pose.position, world_bearing, range + 1e-9);
    if (!hit || hit->kind != kind || hit->index != index) return;
    const double miss = cfg.miss_rate_for(cls);
    if (miss > 0.0 && std::bernoulli_distribution(std::min(miss, 1.0))(rng)) return;
    const auto [lo, hi] = detail::angular_extent(pose.position, world_bearing, range, shape);
    const auto [c0, c1] = project_interval(cam, rel + lo, rel + hi, rel);
    Detection d;
    d.cls = cls;
    d.col_min = c0;
    d.col_max = c1;
    d.bearing = cam.column_bearing((c0 + c1) / 2.0);
    d.confidence = 1.0 - 0.5 * range / cfg.max_range;
    d.entity_id = id;
    out.push_back(std::move(d));
  };

  for (std::size_t i = 0; i < w.obstacles.size(); ++i) {
    const auto& o = w.obstacles[i];
    const Vec2 c = std::holds_alternative<Disc>(o.shape) ? std::get<Disc>(o.shape).center
                                                         : std::get<Rect>(o.shape).center();
    consider(o.id, o.label, o.shape, c, HitKind::Obstacle, i);
  }
  for (std::size_t i = 0; i < scene.dynamics.size(); ++i) {
    const auto& a = scene.dynamics[i];
    consider(a.id, a.label, Disc{a.center, a.radius}, a.center, HitKind::Dynamic, i);
  }
  // Signal heads are mounted above the scene; no occlusion test.
  for (const auto& light : w.lights) {
    const Vec2 p = light.signal_position();
    const double range = distance(pose.position, p);
    const double rel = wrap_angle(bearing_to(pose.position, p) - pose.heading);
    if (std::abs(rel) > cam.fov / 2.0 || range > cfg.max_range) continue;
    const double miss = cfg.miss_rate_for(DetectClass::TrafficLight);
    if (miss > 0.0 && std::bernoulli_distribution(std::min(miss, 1.0))(rng)) continue;
    const double half = std::atan(0.15 / std::max(range, 0.15));
    const auto [c0, c1] = project_interval(cam, rel - half, rel + half, rel);
    Detection d;
    d.cls = DetectClass::TrafficLight;
    d.col_min = c0;
    d.col_max = c1;
    d.bearing = cam.column_bearing((c0 + c1) / 2.0);
    d.confidence = 1.0 - 0.5 * range / cfg.max_range;
    d.phase = light_phase(light, scene.time);
    d.entity_id = light.id;
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<Detection> detect_objects(const World& w, const Pose& pose, double t,
                                             const CameraParams& cam, const PerceptionConfig& cfg,
                                             Rng& rng) {
  return detect_objects(make_scene(w, t), pose, cam, cfg, rng);
}

// --- distance from detection -----------------------------------------------------------

inline double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median depth over the inner fraction of the detection's columns (all
/// rows). Falls back to the completed image when too few pixels are valid;
/// nullopt means no depth at all.
inline std::optional<double> distance_from_detection(const Detection& det, const DepthImage& depth,
                                                     const PerceptionConfig& cfg) {
  const int c0 = std::clamp(det.col_min, 0, depth.width() - 1);
  const int c1 = std::clamp(det.col_max, c0, depth.width() - 1);
  const int n = c1 - c0 + 1;
  const int inner = std::clamp(static_cast<int>(std::lround(n * cfg.inner_fraction)), 1, n);
  const int first = c0 + (n - inner) / 2;
  const int last = first + inner - 1;
  const std::size_t total = static_cast<std::size_t>(inner) * depth.height();

  auto collect = [&](const DepthImage& img) {
    std::vector<double> vals;
    vals.reserve(total);
    for (int y = 0; y < img.height(); ++y)
      for (int x = first; x <= last; ++x)
        if (img.is_valid(x, y)) vals.push_back(img.at(x, y));
    return vals;
  };

  auto vals = collect(depth);
  if (!vals.empty() &&
      static_cast<double>(vals.size()) >= cfg.min_valid_fraction * static_cast<double>(total))
    return median(std::move(vals));
  const auto completed = complete_depth(depth);
  if (!completed) return std::nullopt;
  return median(collect(*completed));
}

// --- fusion ---------------------------------------------------------------------------------

enum SourceFlags : std::uint8_t {
  kSourceVision = 1,
  kSourceUltrasonic = 2,
};

struct ObstacleEstimate {
  double bearing = 0.0;  // body frame
  double distance = 0.0;
  DetectClass cls = DetectClass::Unknown;
  std::uint8_t sources = 0;
  // Angular extent of the detection around `bearing`; zero for echo-only
  // estimates.
  double half_width = 0.0;
};

struct RangedDetection {
  Detection detection;
  std::optional<double> distance;  // nullopt: no depth
};

inline std::vector<ObstacleEstimate> fuse_obstacles(const std::vector<RangedDetection>& detections,
                                                    const UltrasonicReading& echoes,
                                                    const UltrasonicArray& array,
                                                    const CameraParams& cam,
                                                    const PerceptionConfig& cfg) {
  std::vector<ObstacleEstimate> out;
  std::array<bool, kUltrasonicCount> matched{};
  const double pitch = cam.fov / cam.width;

  for (const auto& rd : detections) {
    const auto& det = rd.detection;
    if (det.cls == DetectClass::TrafficLight) continue;
    std::optional<double> echo;
    for (int s = 0; s < kUltrasonicCount; ++s) {
      const auto i = static_cast<std::size_t>(s);
      if (std::abs(wrap_angle(array.headings[i] - det.bearing)) > cfg.bearing_tolerance + 1e-12)
        continue;
      matched[i] = true;
      if (echoes.distance[i] && (!echo || *echoes.distance[i] < *echo)) echo = echoes.distance[i];
    }
    ObstacleEstimate e;
    e.bearing = det.bearing;
    e.cls = det.cls;
    e.half_width = 0.5 * (det.col_max - det.col_min + 1) * pitch;
    if (rd.distance) {
      e.distance = *rd.distance;
      e.sources = kSourceVision;
      if (echo) {
        e.distance = std::min(e.distance, *echo);
        e.sources |= kSourceUltrasonic;
      }
    } else if (echo) {
      e.distance = *echo;
      e.sources = kSourceUltrasonic;
    } else {
      continue;
    }
    out.push_back(e);
  }

  for (int s = 0; s < kUltrasonicCount; ++s) {
    const auto i = static_cast<std::size_t>(s);
    if (matched[i] || !echoes.distance[i]) continue;
    out.push_back({array.headings[i], *echoes.distance[i], DetectClass::Unknown, kSourceUltrasonic,
                   0.0});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.distance < b.distance; });
  return out;
}

}  // namespace openwalk

#endif  // OPENWALK_PERCEPTION_HPP
