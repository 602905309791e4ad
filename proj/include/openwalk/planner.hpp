#ifndef OPENWALK_PLANNER_HPP
#define OPENWALK_PLANNER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

#include "openwalk/geometry.hpp"
#include "openwalk/perception.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

inline constexpr double kBlocked = std::numeric_limits<double>::infinity();

inline bool is_blocked(double cost) { return cost == kBlocked; }

struct PlannerConfig {
  // Indexed by SemanticClass.
  std::array<double, kSemanticClassCount> class_cost{1.0, 1.2, 1.5, 50.0, kBlocked, kBlocked};
  double inflation_radius = 0.4;
  double inflated_cost = 10.0;
  double window_half_extent = 5.0;
  double replan_period = 0.5;
  double straight_threshold = deg_to_rad(15.0);
  double stop_distance = 1.0;
  double arrive_radius = 0.5;
  double footprint_radius = 0.3;  // blocked disc around each obstacle estimate
  double lookahead = 1.0;
  double gate_margin = 0.5;  // zebra cells this close to a light's rect are governed by it

  double cost_of(SemanticClass c) const { return class_cost[static_cast<std::size_t>(c)]; }
  double min_class_cost() const {
    double m = kBlocked;
    for (double c : class_cost) m = std::min(m, c);
    return m;
  }
};

/// Traversal-cost grid. Local cell (0,0) has its lower-left corner at
/// `origin` in world meters.
class Costmap {
 public:
  Costmap() = default;
  Costmap(int width, int height, double resolution, Vec2 origin, double fill, double min_cost)
      : width_(width), height_(height), resolution_(resolution), origin_(origin),
        min_cost_(min_cost), cost_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  /// Lower bound on every finite cell cost; scales the heuristic.
  double min_cost() const { return min_cost_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  double at(Cell c) const { return cost_[index(c)]; }
  void set(Cell c, double v) { cost_[index(c)] = v; }
  bool blocked(Cell c) const { return is_blocked(at(c)); }

  Vec2 center_of(Cell c) const {
    return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
  }
  Cell cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
            static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
  }
  const std::vector<double>& costs() const { return cost_; }
  bool operator==(const Costmap&) const = default;

 private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.1;
  Vec2 origin_{};
  double min_cost_ = 1.0;
  std::vector<double> cost_;
};

/// A signalized zebra region and the phase the planner should assume for it.
struct ZebraGate {
  Rect zebra;
  LightPhase phase = LightPhase::Red;
};

namespace detail {

inline void block_disc(Costmap& map, const Vec2& center, double radius) {
  const Cell lo = map.cell_of({center.x - radius, center.y - radius});
  const Cell hi = map.cell_of({center.x + radius, center.y + radius});
  for (int y = std::max(lo.y, 0); y <= std::min(hi.y, map.height() - 1); ++y)
    for (int x = std::max(lo.x, 0); x <= std::min(hi.x, map.width() - 1); ++x)
      if (distance(map.center_of({x, y}), center) <= radius) map.set({x, y}, kBlocked);
}

inline void inflate(Costmap& map, double radius, double inflated_cost) {
  const int reach = static_cast<int>(std::floor(radius / map.resolution() + 1e-9));
  std::vector<Cell> offsets;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx)
      if ((dx != 0 || dy != 0) &&
          std::hypot(dx, dy) * map.resolution() <= radius + 1e-9)
        offsets.push_back({dx, dy});

  const Costmap src = map;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!src.blocked({x, y})) continue;
      // The blocked cell nearest to any free cell has a free neighbor, so
      // inflating from boundary cells alone is exact.
      bool boundary = false;
      for (int dy = -1; dy <= 1 && !boundary; ++dy)
        for (int dx = -1; dx <= 1 && !boundary; ++dx) {
          const Cell n{x + dx, y + dy};
          if (src.in_bounds(n) && !src.blocked(n)) boundary = true;
        }
      if (!boundary) continue;
      for (const Cell& o : offsets) {
        const Cell n{x + o.x, y + o.y};
        if (!map.in_bounds(n) || map.blocked(n)) continue;
        map.set(n, std::max(map.at(n), inflated_cost));
      }
    }
  }
}

}  // namespace detail

/// Costmap from one observation. `pose` is the agent pose in the frame of
/// `obs.grid_origin`; estimates are placed relative to it.
inline Costmap build_costmap(const SemanticObservation& obs, const Pose& pose,
                             const std::vector<ObstacleEstimate>& estimates,
                             const std::vector<ZebraGate>& gates, const PlannerConfig& cfg) {
  const int n = obs.size();
  const Vec2 origin{obs.grid_origin.x + (obs.center.x - obs.half_cells) * obs.resolution,
                    obs.grid_origin.y + (obs.center.y - obs.half_cells) * obs.resolution};
  Costmap map(n, n, obs.resolution, origin, 0.0, cfg.min_class_cost());

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const SemanticClass c = obs.at({x, y});
      double cost = cfg.cost_of(c);
      if (c == SemanticClass::ZebraCrossing) {
        const Vec2 p = map.center_of({x, y});
        for (const auto& g : gates)
          if (g.phase == LightPhase::Red && g.zebra.distance_to(p) <= cfg.gate_margin) cost = kBlocked;
      }
      map.set({x, y}, cost);
    }
  }

  for (const auto& e : estimates) {
    const double step = obs.resolution * 0.5;
    const double arc = 2.0 * e.half_width * e.distance;
    const int samples = std::max(1, static_cast<int>(std::ceil(arc / step)) + 1);
    for (int i = 0; i < samples; ++i) {
      const double frac = samples == 1 ? 0.5 : static_cast<double>(i) / (samples - 1);
      const double b = pose.heading + e.bearing - e.half_width + 2.0 * e.half_width * frac;
      detail::block_disc(map, pose.position + unit_vector(b) * e.distance, cfg.footprint_radius);
    }
  }

  detail::inflate(map, cfg.inflation_radius, cfg.inflated_cost);
  return map;
}

// --- A* ----------------------------------------------------------------------------------

/// Path costs are summed in integer units of 1e-9 so that every search order
/// yields the same optimum bit for bit. Step costs round up; the heuristic is
/// shrunk by a relative 1e-9 and rounds down, which keeps it consistent under
/// floating-point error.
inline constexpr double kCostUnitsPerMeter = 1e9;
using CostUnits = std::int64_t;

inline CostUnits step_cost_units(double cell_cost, bool diagonal, double resolution) {
  const double len = diagonal ? std::sqrt(2.0) * resolution : resolution;
  return static_cast<CostUnits>(std::ceil(cell_cost * len * kCostUnitsPerMeter));
}

inline CostUnits heuristic_units(const Costmap& map, Cell from, Cell to) {
  const double d = std::hypot(from.x - to.x, from.y - to.y) * map.resolution();
  return static_cast<CostUnits>(
      std::floor(d * map.min_cost() * kCostUnitsPerMeter * (1.0 - 1e-9)));
}

/// E, NE, N, NW, W, SW, S, SE
inline constexpr std::array<Cell, 8> kNeighborOrder{
    Cell{1, 0}, Cell{1, 1}, Cell{0, 1}, Cell{-1, 1}, Cell{-1, 0}, Cell{-1, -1}, Cell{0, -1},
    Cell{1, -1}};

struct PlanPath {
  std::vector<Cell> cells;
  std::vector<Vec2> waypoints;  // cell centers, start to goal
  CostUnits cost_units = 0;

  double total_cost() const { return static_cast<double>(cost_units) / kCostUnitsPerMeter; }
};

struct AStarTrace {
  std::vector<Cell> expanded;  // in expansion order
};

inline std::optional<PlanPath> astar(const Costmap& map, Cell start, Cell goal,
                                     AStarTrace* trace = nullptr) {
  if (!map.in_bounds(start) || !map.in_bounds(goal) || map.blocked(goal)) return std::nullopt;
  const int w = map.width();
  const auto idx = [w](Cell c) { return static_cast<std::size_t>(c.y) * w + c.x; };
  const std::size_t count = static_cast<std::size_t>(w) * map.height();
  constexpr CostUnits kUnreached = std::numeric_limits<CostUnits>::max();
  std::vector<CostUnits> g(count, kUnreached);
  std::vector<std::int32_t> parent(count, -1);
  std::vector<std::uint8_t> closed(count, 0);

  struct Entry {
    CostUnits f;
    CostUnits g;
    std::uint64_t seq;
    Cell cell;
  };
  // Smallest f first; ties prefer larger g, then earlier insertion.
  const auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::uint64_t seq = 0;

  g[idx(start)] = 0;
  open.push({heuristic_units(map, start, goal), 0, seq++, start});
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const std::size_t ti = idx(top.cell);
    if (closed[ti] || top.g != g[ti]) continue;
    closed[ti] = 1;
    if (trace) trace->expanded.push_back(top.cell);
    if (top.cell == goal) break;
    for (const Cell& d : kNeighborOrder) {
      const Cell n{top.cell.x + d.x, top.cell.y + d.y};
      if (!map.in_bounds(n) || map.blocked(n)) continue;
      const std::size_t ni = idx(n);
      if (closed[ni]) continue;
      const CostUnits cand =
          top.g + step_cost_units(map.at(n), d.x != 0 && d.y != 0, map.resolution());
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = static_cast<std::int32_t>(ti);
        open.push({cand + heuristic_units(map, n, goal), cand, seq++, n});
      }
    }
  }
  if (!closed[idx(goal)]) return std::nullopt;

  PlanPath path;
  path.cost_units = g[idx(goal)];
  for (std::int32_t i = static_cast<std::int32_t>(idx(goal)); i != -1; i = parent[static_cast<std::size_t>(i)])
    path.cells.push_back({i % w, i / w});
  std::reverse(path.cells.begin(), path.cells.end());
  path.waypoints.reserve(path.cells.size());
  for (const Cell& c : path.cells) path.waypoints.push_back(map.center_of(c));
  return path;
}

// --- route and local goal ----------------------------------------------------------------

struct RouteSpec {
  std::vector<Vec2> waypoints;
  std::size_t current = 0;

  const Vec2& target() const { return waypoints[std::min(current, waypoints.size() - 1)]; }
  const Vec2& final_goal() const { return waypoints.back(); }
};

/// Advances past reached waypoints, then picks the current waypoint's cell if
/// it is inside the window, else the nearest non-blocked boundary cell.
inline std::optional<Cell> select_local_goal(RouteSpec& route, const Vec2& position,
                                             const Costmap& map, double arrive_radius) {
  while (route.current + 1 < route.waypoints.size() &&
         distance(position, route.waypoints[route.current]) <= arrive_radius)
    ++route.current;
  const Vec2 target = route.target();
  const Cell tc = map.cell_of(target);
  if (map.in_bounds(tc)) return tc;

  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  auto offer = [&](Cell c) {
    if (map.blocked(c)) return;
    const double d = distance(map.center_of(c), target);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  };
  const int w = map.width();
  const int h = map.height();
  for (int y = 0; y < h; ++y) {
    if (y == 0 || y == h - 1) {
      for (int x = 0; x < w; ++x) offer({x, y});
    } else {
      offer({0, y});
      if (w > 1) offer({w - 1, y});
    }
  }
  return best;
}

// --- instructions --------------------------------------------------------------------------

enum class Instruction : std::uint8_t { GoStraight, TurnLeft, TurnRight, Wait, Stop, Arrived };

inline constexpr std::string_view instruction_name(Instruction i) {
  switch (i) {
    case Instruction::GoStraight: return "go_straight";
    case Instruction::TurnLeft: return "turn_left";
    case Instruction::TurnRight: return "turn_right";
    case Instruction::Wait: return "wait";
    case Instruction::Stop: return "stop";
    case Instruction::Arrived: return "arrived";
  }
  return "stop";
}

inline std::optional<Instruction> instruction_from_name(std::string_view s) {
  for (auto i : {Instruction::GoStraight, Instruction::TurnLeft, Instruction::TurnRight,
                 Instruction::Wait, Instruction::Stop, Instruction::Arrived})
    if (instruction_name(i) == s) return i;
  return std::nullopt;
}

/// Path waypoint whose arc length from the start is nearest to `ahead`.
inline Vec2 lookahead_point(const PlanPath& plan, double ahead) {
  double s = 0.0;
  std::size_t best = 0;
  double best_err = ahead;
  for (std::size_t i = 1; i < plan.waypoints.size(); ++i) {
    s += distance(plan.waypoints[i - 1], plan.waypoints[i]);
    const double err = std::abs(s - ahead);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  return plan.waypoints[best];
}

/// Priority: Arrived, Wait, Stop, then steering from the path. An obstacle
/// estimate triggers Stop when it lies within the straight threshold of the
/// direction the path leads and no farther than the stop distance.
inline Instruction make_instruction(const std::optional<PlanPath>& plan, const Pose& pose,
                                    const std::vector<ObstacleEstimate>& estimates, bool wait_flag,
                                    const Vec2& final_goal, const PlannerConfig& cfg) {
  if (distance(pose.position, final_goal) <= cfg.arrive_radius) return Instruction::Arrived;
  if (wait_flag) return Instruction::Wait;
  if (!plan) return Instruction::Stop;

  const Vec2 look = lookahead_point(*plan, cfg.lookahead);
  const double delta = distance(pose.position, look) > 1e-9
                           ? wrap_angle(bearing_to(pose.position, look) - pose.heading)
                           : 0.0;
  for (const auto& e : estimates)
    if (e.distance <= cfg.stop_distance &&
        std::abs(wrap_angle(e.bearing - delta)) <= cfg.straight_threshold)
      return Instruction::Stop;
  if (delta > cfg.straight_threshold) return Instruction::TurnLeft;
  if (delta < -cfg.straight_threshold) return Instruction::TurnRight;
  return Instruction::GoStraight;
}

}  // namespace openwalk

#endif  // OPENWALK_PLANNER_HPP
