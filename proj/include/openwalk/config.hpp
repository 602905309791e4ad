#ifndef OPENWALK_CONFIG_HPP
#define OPENWALK_CONFIG_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "openwalk/harness.hpp"
#include "openwalk/json_util.hpp"
#include "openwalk/scenarios.hpp"
#include "openwalk/world_io.hpp"

namespace openwalk {

inline constexpr std::string_view kConfigSchema = "openwalk-config/1";
inline constexpr std::string_view kRouteSchema = "openwalk-route/1";

inline RouteSpec route_from_json(const nlohmann::json& doc) {
  using namespace jsonutil;
  require_schema(doc, kRouteSchema, "route");
  RouteSpec r;
  const auto& pts = as_array(require(doc, "waypoints", "route"), "route.waypoints");
  for (std::size_t i = 0; i < pts.size(); ++i) r.waypoints.push_back(as_vec2(pts[i], item("route.waypoints", i)));
  if (r.waypoints.empty()) throw ValidationError("route: needs at least one waypoint");
  return r;
}

inline nlohmann::json route_to_json(const RouteSpec& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.waypoints) pts.push_back(jsonutil::to_json(p));
  return {{"schema", kRouteSchema}, {"waypoints", std::move(pts)}};
}

namespace detail {

/// A block is either inline or a path to a file, relative to the config.
inline nlohmann::json inline_or_file(const nlohmann::json& j, const std::filesystem::path& base,
                                     const std::string& what) {
  if (!j.is_string()) return j;
  const std::filesystem::path p = base / j.get<std::string>();
  return jsonutil::parse_document(read_text_file(p.string()), what);
}

inline void check_rate(double v, const std::string& path) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(path + ": rate must be in [0, 1]");
}

inline void apply_sensors(const nlohmann::json& j, SensorConfig& s, std::uint64_t& seed) {
  using namespace jsonutil;
  if (j.contains("camera")) {
    const auto& c = j["camera"];
    const std::string p = "sensors.camera";
    s.camera.width = int_or(c, "width", p, s.camera.width);
    s.camera.height = int_or(c, "height", p, s.camera.height);
    if (c.contains("fov_deg")) s.camera.fov = deg_to_rad(as_number(c["fov_deg"], child(p, "fov_deg")));
    s.camera.min_range = number_or(c, "min_m", p, s.camera.min_range);
    s.camera.max_range = number_or(c, "max_m", p, s.camera.max_range);
    s.depth_noise.dropout = number_or(c, "dropout_p", p, s.depth_noise.dropout);
    check_rate(s.depth_noise.dropout, child(p, "dropout_p"));
    s.depth_noise.holes = int_or(c, "holes", p, s.depth_noise.holes);
    s.depth_noise.hole_radius = int_or(c, "hole_radius_px", p, s.depth_noise.hole_radius);
    if (s.depth_noise.holes < 0 || s.depth_noise.hole_radius < 0)
      throw ValidationError(p + ": holes and hole_radius_px must be >= 0");
    if (!s.camera.valid()) throw ValidationError(p + ": invalid camera parameters");
  }
  if (j.contains("ultrasonic")) {
    const auto& u = j["ultrasonic"];
    const std::string p = "sensors.ultrasonic";
    if (u.contains("headings_deg")) {
      const auto& h = as_array(u["headings_deg"], child(p, "headings_deg"));
      if (h.size() != kUltrasonicCount)
        throw ValidationError(p + ".headings_deg: exactly 5 sensors required");
      for (std::size_t i = 0; i < h.size(); ++i)
        s.ultrasonic.headings[i] = deg_to_rad(as_number(h[i], item(child(p, "headings_deg"), i)));
    }
    if (u.contains("half_angle_deg"))
      s.ultrasonic.half_angle = deg_to_rad(as_number(u["half_angle_deg"], child(p, "half_angle_deg")));
    s.ultrasonic.max_range = number_or(u, "max_m", p, s.ultrasonic.max_range);
    if (!s.ultrasonic.valid()) throw ValidationError(p + ": half angle must be in (0, 45) degrees");
  }
  if (j.contains("gps")) {
    s.gps_sigma = number_or(j["gps"], "sigma_m", "sensors.gps", s.gps_sigma);
    if (s.gps_sigma < 0.0) throw ValidationError("sensors.gps.sigma_m: must be >= 0");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("sensors.seed: expected a non-negative integer");
    seed = j["seed"].get<std::uint64_t>();
  }
}

inline void apply_perception(const nlohmann::json& j, PerceptionConfig& c) {
  using namespace jsonutil;
  const std::string p = "perception";
  c.mislabel_rate = number_or(j, "mislabel_rate", p, c.mislabel_rate);
  check_rate(c.mislabel_rate, child(p, "mislabel_rate"));
  if (j.contains("miss_rate")) {
    const auto& m = j["miss_rate"];
    if (m.is_number()) {
      c.miss_rate.fill(m.get<double>());
    } else if (m.is_object()) {
      for (const auto& [k, v] : m.items()) {
        const auto cls = detect_class_from_label(k);
        if (cls == DetectClass::Unknown) throw ParseError(p + ".miss_rate: unknown class '" + k + "'");
        c.miss_rate[static_cast<std::size_t>(cls)] = as_number(v, p + ".miss_rate." + k);
      }
    } else {
      throw ParseError(p + ".miss_rate: expected a number or an object");
    }
    for (double r : c.miss_rate) check_rate(r, child(p, "miss_rate"));
  }
  c.max_range = number_or(j, "max_range_m", p, c.max_range);
  if (j.contains("bearing_tolerance_deg"))
    c.bearing_tolerance = deg_to_rad(as_number(j["bearing_tolerance_deg"], child(p, "bearing_tolerance_deg")));
  c.inner_fraction = number_or(j, "inner_fraction", p, c.inner_fraction);
  c.min_valid_fraction = number_or(j, "min_valid_fraction", p, c.min_valid_fraction);
  check_rate(c.inner_fraction, child(p, "inner_fraction"));
  check_rate(c.min_valid_fraction, child(p, "min_valid_fraction"));
}

inline void apply_planner(const nlohmann::json& j, PlannerConfig& c, PerceptionConfig& perc) {
  using namespace jsonutil;
  const std::string p = "planner";
  if (j.contains("class_costs")) {
    for (const auto& [k, v] : j["class_costs"].items()) {
      if (k.size() != 1 || !class_from_char(k[0]))
        throw ParseError(p + ".class_costs: unknown class '" + k + "'");
      const auto idx = static_cast<std::size_t>(*class_from_char(k[0]));
      if (v.is_string() && v.get<std::string>() == "blocked") {
        c.class_cost[idx] = kBlocked;
      } else {
        const double cost = as_number(v, p + ".class_costs." + k);
        if (!(cost > 0.0)) throw ValidationError(p + ".class_costs." + k + ": must be > 0");
        c.class_cost[idx] = cost;
      }
    }
  }
  c.inflation_radius = number_or(j, "inflation_radius_m", p, c.inflation_radius);
  c.inflated_cost = number_or(j, "inflated_cost", p, c.inflated_cost);
  if (j.contains("window_half_extent_m")) {
    c.window_half_extent = as_number(j["window_half_extent_m"], child(p, "window_half_extent_m"));
    perc.window_half_extent = c.window_half_extent;
  }
  c.replan_period = number_or(j, "replan_period_s", p, c.replan_period);
  if (j.contains("straight_threshold_deg"))
    c.straight_threshold = deg_to_rad(as_number(j["straight_threshold_deg"], child(p, "straight_threshold_deg")));
  c.stop_distance = number_or(j, "stop_distance_m", p, c.stop_distance);
  c.arrive_radius = number_or(j, "arrive_radius_m", p, c.arrive_radius);
  c.lookahead = number_or(j, "lookahead_m", p, c.lookahead);
  if (!(c.replan_period > 0.0 && c.straight_threshold > 0.0 && c.stop_distance > 0.0 &&
        c.arrive_radius > 0.0 && c.window_half_extent > 0.0 && c.inflation_radius >= 0.0))
    throw ValidationError(p + ": periods, thresholds and distances must be positive");
}

inline void apply_agents(const nlohmann::json& j, SystemAgentConfig& s, BaselineAgentConfig& b) {
  using namespace jsonutil;
  if (j.contains("system")) {
    const auto& a = j["system"];
    const std::string p = "agent.system";
    s.speed = number_or(a, "speed_mps", p, s.speed);
    s.turn_rate = number_or(a, "turn_rate_radps", p, s.turn_rate);
    s.latency = number_or(a, "latency_s", p, s.latency);
    s.radius = number_or(a, "radius_m", p, s.radius);
    s.heading_sigma = number_or(a, "heading_sigma_rad", p, s.heading_sigma);
  }
  if (j.contains("baseline")) {
    const auto& a = j["baseline"];
    const std::string p = "agent.baseline";
    b.reach = number_or(a, "reach_m", p, b.reach);
    if (a.contains("sweep_half_angle_deg"))
      b.sweep_half_angle = deg_to_rad(as_number(a["sweep_half_angle_deg"], child(p, "sweep_half_angle_deg")));
    b.speed = number_or(a, "speed_mps", p, b.speed);
    b.backoff = number_or(a, "backoff_m", p, b.backoff);
    b.heading_sigma = number_or(a, "heading_sigma_rad", p, b.heading_sigma);
    b.radius = number_or(a, "radius_m", p, b.radius);
  }
}

inline void apply_schedule(const nlohmann::json& j, TickSchedule& s, PlannerConfig& planner) {
  using namespace jsonutil;
  s.physics_step = number_or(j, "physics_step_s", "schedule", s.physics_step);
  s.planning_period = number_or(j, "planning_period_s", "schedule", s.planning_period);
  s.max_time = number_or(j, "max_time_s", "schedule", s.max_time);
  planner.replan_period = s.planning_period;
  s.validate();
}

}  // namespace detail

/// Applies the tunable blocks of a config document onto a scenario.
inline void apply_config_blocks(const nlohmann::json& doc, ScenarioSpec& s) {
  using namespace jsonutil;
  if (doc.contains("sensors")) detail::apply_sensors(doc["sensors"], s.config.sensors, s.seed_base);
  if (doc.contains("perception")) detail::apply_perception(doc["perception"], s.config.perception);
  if (doc.contains("planner"))
    detail::apply_planner(doc["planner"], s.config.planner, s.config.perception);
  if (doc.contains("agent")) detail::apply_agents(doc["agent"], s.config.system, s.config.baseline);
  if (doc.contains("schedule")) detail::apply_schedule(doc["schedule"], s.config.schedule, s.config.planner);
  if (doc.contains("runs")) s.runs = as_int(doc["runs"], "runs");
  if (doc.contains("success_rule")) {
    const auto rule = as_string(doc["success_rule"], "success_rule");
    if (rule == "reach_goal")
      s.rule = SuccessRule::ReachGoal;
    else if (rule == "cross_within_green")
      s.rule = SuccessRule::CrossWithinGreen;
    else
      throw ParseError("success_rule: expected reach_goal or cross_within_green");
  }
}

/// Full scenario from a config document. A `scenario` key starts from a
/// built-in scenario; otherwise `world` and `route` are required.
inline ScenarioSpec scenario_from_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = {}) {
  using namespace jsonutil;
  require_schema(doc, kConfigSchema, "config");
  ScenarioSpec s;
  if (doc.contains("scenario")) {
    s = build_scenario(as_string(doc["scenario"], "scenario"));
  } else {
    s.name = "custom";
    if (!doc.contains("world") || !doc.contains("route"))
      throw ParseError("config: needs 'scenario' or both 'world' and 'route'");
  }
  if (doc.contains("name")) s.name = as_string(doc["name"], "name");
  if (doc.contains("world")) s.world = world_from_json(detail::inline_or_file(doc["world"], base_dir, "world"));
  if (doc.contains("route")) s.route = route_from_json(detail::inline_or_file(doc["route"], base_dir, "route"));
  apply_config_blocks(doc, s);
  s.validate();
  return s;
}

inline ScenarioSpec load_config_file(const std::string& path) {
  const auto doc = jsonutil::parse_document(read_text_file(path), "config");
  return scenario_from_config(doc, std::filesystem::path(path).parent_path());
}

}  // namespace openwalk

#endif  // OPENWALK_CONFIG_HPP
