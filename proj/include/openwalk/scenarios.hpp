#ifndef OPENWALK_SCENARIOS_HPP
#define OPENWALK_SCENARIOS_HPP

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "openwalk/agent.hpp"
#include "openwalk/error.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

enum class SuccessRule { ReachGoal, CrossWithinGreen };

struct ScenarioSpec {
  std::string name;
  World world;
  RouteSpec route;
  EpisodeConfig config;
  int runs = 1;
  AgentKind agent = AgentKind::System;
  std::uint64_t seed_base = 1;
  SuccessRule rule = SuccessRule::ReachGoal;

  void validate() const {
    if (runs < 1) throw ValidationError("scenario: runs must be >= 1");
    check_episode_inputs(world, route, config);
  }
};

struct ScenarioOverrides {
  std::optional<int> runs;
  std::optional<AgentKind> agent;
  std::optional<std::uint64_t> seed_base;
  std::optional<double> max_time;
  bool no_noise = false;
  // navigate only
  std::optional<int> pedestrians;
  std::optional<int> cyclists;
};

inline constexpr std::string_view kScenarioNames[] = {"navigate", "obstacles", "intersection"};

inline bool is_scenario_name(std::string_view s) {
  for (auto n : kScenarioNames)
    if (n == s) return true;
  return false;
}

namespace detail {

inline SemanticGrid make_grid(const Rect& extent, SemanticClass fill, double res = 0.1) {
  const int w = static_cast<int>(std::lround((extent.max.x - extent.min.x) / res));
  const int h = static_cast<int>(std::lround((extent.max.y - extent.min.y) / res));
  return SemanticGrid(w, h, res, extent.min, fill);
}

inline ObstacleSpec person_at(std::string id, Vec2 c) { return {std::move(id), Disc{c, 0.3}, "person"}; }

inline ObstacleSpec bicycle_at(std::string id, Vec2 min, bool along_x = true) {
  const Vec2 size = along_x ? Vec2{1.7, 0.6} : Vec2{0.6, 1.7};
  return {std::move(id), Rect{min, min + size}, "bicycle"};
}

inline DynamicAgentSpec mover(std::string id, std::string label, std::vector<Vec2> path,
                              double speed, double start, bool loop) {
  DynamicAgentSpec a;
  a.id = std::move(id);
  a.label = std::move(label);
  a.radius = 0.3;
  a.path = std::move(path);
  a.speed = speed;
  a.start_time = start;
  a.loop = loop;
  return a;
}

}  // namespace detail

/// True if a disc of `radius` can travel from start to goal through walkable
/// cells without overlapping a static obstacle. Flood fill over cell centers.
inline bool clear_corridor_exists(const World& w, double radius) {
  const auto& g = w.grid;
  std::vector<std::uint8_t> free(g.size(), 0);
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const Vec2 c = g.center_of({x, y});
      if (!is_walkable(g.at({x, y}))) continue;
      if (!collision_check_static(c, radius, w).empty()) continue;
      free[static_cast<std::size_t>(y) * g.width() + x] = 1;
    }
  }
  const Cell s = g.cell_of(w.start.position);
  const Cell t = g.cell_of(w.goal);
  auto id = [&](Cell c) { return static_cast<std::size_t>(c.y) * g.width() + c.x; };
  if (!g.in_bounds(s) || !g.in_bounds(t) || !free[id(s)] || !free[id(t)]) return false;
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::queue<Cell> q;
  q.push(s);
  seen[id(s)] = 1;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop();
    if (c == t) return true;
    for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (!g.in_bounds(n) || !free[id(n)] || seen[id(n)]) continue;
      seen[id(n)] = 1;
      q.push(n);
    }
  }
  return false;
}

inline ScenarioSpec obstacles_scenario() {
  ScenarioSpec s;
  s.name = "obstacles";
  s.runs = 10;
  s.world.grid = detail::make_grid({{0.0, 0.0}, {24.0, 4.0}}, SemanticClass::Sidewalk);
  s.world.grid.paint({{0.0, 1.7}, {24.0, 2.3}}, SemanticClass::BlindTrack);
  // Slalom through a 20 m stretch, alternating sides.
  s.world.obstacles = {
      detail::person_at("person-1", {5.0, 1.6}),
      detail::bicycle_at("bicycle-1", {7.5, 2.2}),
      detail::person_at("person-2", {11.5, 2.6}),
      detail::bicycle_at("bicycle-2", {13.8, 1.0}),
      detail::person_at("person-3", {17.0, 1.5}),
      detail::bicycle_at("bicycle-3", {19.5, 2.4}),
  };
  s.world.start = {{1.0, 2.0}, 0.0};
  s.world.goal = {23.0, 2.0};
  s.route.waypoints = {s.world.goal};
  s.config.schedule.max_time = 600.0;
  validate(s.world);
  // An 0.8 m wide gap admits a 0.4 m radius disc.
  if (!clear_corridor_exists(s.world, 0.4))
    throw ValidationError("obstacles: no 0.8 m collision-free corridor");
  return s;
}

inline ScenarioSpec intersection_scenario() {
  ScenarioSpec s;
  s.name = "intersection";
  s.runs = 5;
  s.rule = SuccessRule::CrossWithinGreen;
  auto& w = s.world;
  w.grid = detail::make_grid({{0.0, 0.0}, {18.0, 6.0}}, SemanticClass::Sidewalk);
  w.grid.paint({{4.0, 0.0}, {14.0, 6.0}}, SemanticClass::Roadway);
  w.grid.paint({{4.0, 1.5}, {14.0, 4.5}}, SemanticClass::ZebraCrossing);
  w.grid.paint({{0.0, 2.7}, {4.0, 3.3}}, SemanticClass::BlindTrack);
  w.grid.paint({{14.0, 2.7}, {18.0, 3.3}}, SemanticClass::BlindTrack);

  TrafficLight light;
  light.id = "light-1";
  light.zebra = {{4.0, 1.5}, {14.0, 4.5}};
  light.green = 60.0;
  light.red = 30.0;
  light.offset = 15.0;  // red on arrival
  light.signal = Vec2{6.0, 4.0};
  w.lights = {light};

  w.dynamics = {
      detail::mover("pedestrian-1", "person", {{14.5, 4.1}, {3.5, 4.1}}, 1.0, 16.0, false),
      detail::mover("pedestrian-2", "person", {{3.5, 1.9}, {14.5, 1.9}}, 1.2, 18.0, false),
      detail::mover("cyclist-1", "bicycle", {{9.0, 0.2}, {9.0, 5.8}}, 4.0, 1.0, false),
  };
  w.start = {{2.0, 3.0}, 0.0};
  w.goal = {15.5, 3.0};
  s.route.waypoints = {w.goal};
  s.config.schedule.max_time = 180.0;
  validate(w);
  return s;
}

inline ScenarioSpec navigate_scenario(int pedestrians = 3, int cyclists = 2) {
  ScenarioSpec s;
  s.name = "navigate";
  s.runs = 5;
  auto& w = s.world;
  w.grid = detail::make_grid({{0.0, -3.0}, {76.0, 18.0}}, SemanticClass::OffMap);
  w.grid.paint({{0.0, -3.0}, {76.0, 0.0}}, SemanticClass::Roadway);
  w.grid.paint({{0.0, 0.0}, {30.0, 4.0}}, SemanticClass::Sidewalk);
  w.grid.paint({{40.0, 0.0}, {72.0, 4.0}}, SemanticClass::Sidewalk);
  w.grid.paint({{68.0, 0.0}, {72.0, 18.0}}, SemanticClass::Sidewalk);
  w.grid.paint({{30.0, 0.0}, {40.0, 6.0}}, SemanticClass::Roadway);
  w.grid.paint({{30.0, 0.5}, {40.0, 3.5}}, SemanticClass::ZebraCrossing);
  w.grid.paint({{0.0, 1.7}, {30.0, 2.3}}, SemanticClass::BlindTrack);
  w.grid.paint({{40.0, 1.7}, {70.3, 2.3}}, SemanticClass::BlindTrack);
  w.grid.paint({{69.7, 1.7}, {70.3, 18.0}}, SemanticClass::BlindTrack);

  TrafficLight light;
  light.id = "light-1";
  light.zebra = {{30.0, 0.5}, {40.0, 3.5}};
  light.signal = Vec2{32.0, 2.8};
  w.lights = {light};

  const std::vector<DynamicAgentSpec> peds = {
      detail::mover("pedestrian-1", "person", {{26.0, 3.3}, {4.0, 3.3}}, 0.8, 0.0, true),
      detail::mover("pedestrian-2", "person", {{45.0, 0.7}, {66.0, 0.7}}, 0.6, 0.0, true),
      detail::mover("pedestrian-3", "person", {{71.3, 4.0}, {71.3, 16.0}}, 0.5, 0.0, true),
  };
  const std::vector<DynamicAgentSpec> bikes = {
      detail::mover("cyclist-1", "bicycle", {{1.0, -1.5}, {75.0, -1.5}}, 3.0, 0.0, true),
      detail::mover("cyclist-2", "bicycle", {{42.0, 3.5}, {67.0, 3.5}}, 2.5, 0.0, true),
  };
  if (pedestrians < 0 || pedestrians > static_cast<int>(peds.size()) || cyclists < 0 ||
      cyclists > static_cast<int>(bikes.size()))
    throw ValidationError("navigate: supports 0-3 pedestrians and 0-2 cyclists");
  w.dynamics.assign(peds.begin(), peds.begin() + pedestrians);
  w.dynamics.insert(w.dynamics.end(), bikes.begin(), bikes.begin() + cyclists);

  w.start = {{2.0, 2.0}, 0.0};
  w.goal = {70.0, 14.0};
  s.route.waypoints = {{29.0, 2.0}, {41.0, 2.0}, {70.0, 2.0}, w.goal};
  s.config.schedule.max_time = 1500.0;
  validate(w);
  return s;
}

inline double route_length(const World& w, const RouteSpec& r) {
  std::vector<Vec2> pts{w.start.position};
  pts.insert(pts.end(), r.waypoints.begin(), r.waypoints.end());
  return polyline_length(pts);
}

inline ScenarioSpec apply_overrides(ScenarioSpec s, const ScenarioOverrides& o) {
  if (o.runs) s.runs = *o.runs;
  if (o.agent) s.agent = *o.agent;
  if (o.seed_base) s.seed_base = *o.seed_base;
  if (o.max_time) s.config.schedule.max_time = *o.max_time;
  if (o.no_noise) s.config = without_noise(s.config);
  return s;
}

inline ScenarioSpec build_scenario(std::string_view name, const ScenarioOverrides& o = {}) {
  ScenarioSpec s;
  if (name == "navigate")
    s = navigate_scenario(o.pedestrians.value_or(3), o.cyclists.value_or(2));
  else if (name == "obstacles")
    s = obstacles_scenario();
  else if (name == "intersection")
    s = intersection_scenario();
  else
    throw ConfigError("unknown scenario '" + std::string(name) +
                      "' (expected navigate, obstacles or intersection)");
  s = apply_overrides(std::move(s), o);
  s.validate();
  return s;
}

/// Scenario-specific success. Crossing needs the zebra entered on green and
/// left before that green window closes.
inline bool scenario_success(const ScenarioSpec& s, const EpisodeResult& r) {
  if (!r.success) return false;
  if (s.rule == SuccessRule::ReachGoal) return true;
  for (const auto& light : s.world.lights) {
    bool found = false;
    for (const auto& z : r.zebra_events) {
      if (z.light != light.id) continue;
      found = true;
      if (light_phase(light, z.entered) != LightPhase::Green || !z.exited) return false;
      const auto end = green_window_end(light, z.entered);
      if (!end || *z.exited > *end) return false;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace openwalk

#endif  // OPENWALK_SCENARIOS_HPP
