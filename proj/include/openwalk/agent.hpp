#ifndef OPENWALK_AGENT_HPP
#define OPENWALK_AGENT_HPP

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "openwalk/error.hpp"
#include "openwalk/perception.hpp"
#include "openwalk/planner.hpp"
#include "openwalk/sensors.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

struct SystemAgentConfig {
  double speed = 0.4;
  double turn_rate = 0.785;
  double latency = 0.3;
  double radius = 0.3;
  double heading_sigma = 0.02;  // per physics step while walking
};

struct BaselineAgentConfig {
  double reach = 1.0;
  double sweep_half_angle = deg_to_rad(45.0);
  double speed = 0.1;
  double backoff = 0.5;
  double heading_sigma = 0.3;
  double turn_min = deg_to_rad(30.0);
  double turn_max = deg_to_rad(90.0);
  double radius = 0.3;
};

struct TickSchedule {
  double physics_step = 0.1;
  double planning_period = 0.5;
  double max_time = 600.0;

  std::int64_t step_us() const { return std::llround(physics_step * 1e6); }
  int steps_per_plan() const {
    return static_cast<int>(std::llround(planning_period * 1e6) / step_us());
  }
  std::int64_t total_steps() const { return std::llround(max_time * 1e6) / step_us(); }
  /// Exact simulated time of physics step n.
  double time_at(std::int64_t n) const { return static_cast<double>(n * step_us()) / 1e6; }

  void validate() const {
    if (!(physics_step > 0.0) || step_us() <= 0)
      throw ValidationError("schedule: physics_step must be > 0");
    const auto period_us = std::llround(planning_period * 1e6);
    if (period_us <= 0 || period_us % step_us() != 0)
      throw ValidationError("schedule: planning_period must be a positive multiple of physics_step");
    if (!(max_time > 0.0)) throw ValidationError("schedule: max_time must be > 0");
  }
};

struct SensorConfig {
  CameraParams camera;
  DepthNoiseModel depth_noise{0.1, 2, 3};
  UltrasonicArray ultrasonic;
  double gps_sigma = 0.2;
};

enum class AgentKind { System, Baseline };

inline constexpr std::string_view agent_kind_name(AgentKind k) {
  return k == AgentKind::System ? "system" : "baseline";
}

struct EpisodeConfig {
  SensorConfig sensors;
  PerceptionConfig perception;
  PlannerConfig planner;
  SystemAgentConfig system;
  BaselineAgentConfig baseline;
  TickSchedule schedule;
};

/// Zeroes sensing, perception and execution noise. The baseline's heading
/// noise is its behavior model and stays.
inline EpisodeConfig without_noise(EpisodeConfig cfg) {
  cfg.sensors.depth_noise = {0.0, 0, cfg.sensors.depth_noise.hole_radius};
  cfg.sensors.gps_sigma = 0.0;
  cfg.perception.mislabel_rate = 0.0;
  cfg.perception.miss_rate.fill(0.0);
  cfg.system.heading_sigma = 0.0;
  return cfg;
}

// --- body motion -------------------------------------------------------------------

struct MotionOutcome {
  Vec2 position;
  std::vector<std::string> contacts;  // static obstacles the attempted move overlapped
};

/// Moves a body disc from `from` toward `proposed`. Overlap with a static
/// obstacle is recorded as a contact and resolved by pushing the disc out
/// along the surface normal (sliding); solid terrain stops the blocked axis.
inline MotionOutcome resolve_motion(const World& w, const Vec2& from, const Vec2& proposed,
                                    double radius) {
  MotionOutcome out;
  out.contacts = collision_check_static(proposed, radius, w).ids;
  Vec2 p = proposed;
  for (int iter = 0; iter < 4 && !collision_check_static(p, radius, w).empty(); ++iter) {
    for (const auto& o : w.obstacles) {
      if (!disc_overlaps(p, radius, o.shape)) continue;
      if (const auto* d = std::get_if<Disc>(&o.shape)) {
        Vec2 n = p - d->center;
        if (n.norm() < 1e-12) n = from - d->center;
        if (n.norm() < 1e-12) n = {1.0, 0.0};
        p = d->center + n * ((d->radius + radius + 1e-9) / n.norm());
      } else {
        const auto& r = std::get<Rect>(o.shape);
        const Vec2 q = r.closest_point(p);
        Vec2 n = p - q;
        if (n.norm() < 1e-12) {
          // Center inside the rect: leave through the nearest face.
          const double faces[4] = {p.x - r.min.x, r.max.x - p.x, p.y - r.min.y, r.max.y - p.y};
          int k = 0;
          for (int i = 1; i < 4; ++i)
            if (faces[i] < faces[k]) k = i;
          const Vec2 exits[4] = {{r.min.x - radius - 1e-9, p.y},
                                 {r.max.x + radius + 1e-9, p.y},
                                 {p.x, r.min.y - radius - 1e-9},
                                 {p.x, r.max.y + radius + 1e-9}};
          p = exits[k];
        } else {
          p = q + n * ((radius + 1e-9) / n.norm());
        }
      }
    }
  }
  if (!collision_check_static(p, radius, w).empty()) p = from;

  if (is_solid(w.grid.class_at(p))) {
    const Vec2 slide_x{p.x, from.y};
    const Vec2 slide_y{from.x, p.y};
    if (!is_solid(w.grid.class_at(slide_x)) && collision_check_static(slide_x, radius, w).empty())
      p = slide_x;
    else if (!is_solid(w.grid.class_at(slide_y)) &&
             collision_check_static(slide_y, radius, w).empty())
      p = slide_y;
    else
      p = from;
  }
  out.position = p;
  return out;
}

struct StepResult {
  KinematicState state;
  std::vector<std::string> contacts;
};

inline StepResult step_system_agent(const KinematicState& state, Instruction active, double dt,
                                    const World& w, const SystemAgentConfig& cfg, Rng& rng) {
  StepResult r;
  r.state = state;
  r.state.speed = 0.0;
  r.state.angular_rate = 0.0;
  switch (active) {
    case Instruction::GoStraight: {
      double heading = state.pose.heading;
      if (cfg.heading_sigma > 0.0)
        heading += std::normal_distribution<double>(0.0, cfg.heading_sigma)(rng);
      heading = wrap_angle(heading);
      const Vec2 proposed = state.pose.position + unit_vector(heading) * (cfg.speed * dt);
      auto m = resolve_motion(w, state.pose.position, proposed, cfg.radius);
      r.state.pose = {m.position, heading};
      r.state.speed = distance(m.position, state.pose.position) / dt;
      r.state.angular_rate = wrap_angle(heading - state.pose.heading) / dt;
      r.contacts = std::move(m.contacts);
      break;
    }
    case Instruction::TurnLeft:
    case Instruction::TurnRight: {
      const double sign = active == Instruction::TurnLeft ? 1.0 : -1.0;
      r.state.pose.heading = wrap_angle(state.pose.heading + sign * cfg.turn_rate * dt);
      r.state.angular_rate = sign * cfg.turn_rate;
      // Turning in place can still touch a neighbor the body already presses.
      r.contacts = collision_check_static(state.pose.position, cfg.radius, w).ids;
      break;
    }
    case Instruction::Wait:
    case Instruction::Stop:
    case Instruction::Arrived:
      r.contacts = collision_check_static(state.pose.position, cfg.radius, w).ids;
      break;
  }
  return r;
}

// --- baseline (white cane) agent -----------------------------------------------------

struct BaselineState {
  KinematicState kin;
  double avoid_remaining = 0.0;  // meters left on the current turn-away leg
};

struct BaselineStepResult {
  BaselineState state;
  std::vector<std::string> contacts;       // body
  std::vector<std::string> cane_contacts;  // cane tip
};

struct CaneTouch {
  std::string id;
  double distance = 0.0;
  double bearing = 0.0;  // body frame
};

/// Nearest entity whose nearest surface point is within the cane's reach and
/// sweep.
inline std::optional<CaneTouch> cane_probe(const Scene& scene, const Pose& pose,
                                           const BaselineAgentConfig& cfg) {
  std::optional<CaneTouch> best;
  auto offer = [&](const std::string& id, const Vec2& nearest, double d) {
    if (d > cfg.reach) return;
    const double rel = d > 1e-12 ? wrap_angle(bearing_to(pose.position, nearest) - pose.heading) : 0.0;
    if (std::abs(rel) > cfg.sweep_half_angle + 1e-12) return;
    if (!best || d < best->distance) best = CaneTouch{id, d, rel};
  };
  for (const auto& o : scene.world->obstacles) {
    if (const auto* d = std::get_if<Disc>(&o.shape)) {
      offer(o.id, d->center, std::max(0.0, distance(pose.position, d->center) - d->radius));
    } else {
      const auto& r = std::get<Rect>(o.shape);
      const Vec2 q = r.closest_point(pose.position);
      offer(o.id, r.contains(pose.position) ? r.center() : q, distance(pose.position, q));
    }
  }
  for (const auto& a : scene.dynamics)
    offer(a.id, a.center, std::max(0.0, distance(pose.position, a.center) - a.radius));
  return best;
}

inline BaselineStepResult step_baseline_agent(const BaselineState& state, const Scene& scene,
                                              const Vec2& target, double dt,
                                              const BaselineAgentConfig& cfg, Rng& rng) {
  BaselineStepResult r;
  r.state = state;
  const Pose& pose = state.kin.pose;
  double heading = pose.heading;

  const auto touch = cane_probe(scene, pose, cfg);
  if (touch) r.cane_contacts.push_back(touch->id);

  if (touch && state.avoid_remaining <= 0.0) {
    const double turn = std::uniform_real_distribution<double>(cfg.turn_min, cfg.turn_max)(rng);
    double side;
    if (touch->bearing > 1e-9)
      side = -1.0;
    else if (touch->bearing < -1e-9)
      side = 1.0;
    else
      side = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    heading = wrap_angle(heading + side * turn);
    r.state.avoid_remaining = cfg.backoff;
  } else if (state.avoid_remaining <= 0.0) {
    heading = bearing_to(pose.position, target);
    if (cfg.heading_sigma > 0.0)
      heading += std::normal_distribution<double>(0.0, cfg.heading_sigma)(rng);
    heading = wrap_angle(heading);
  }

  const Vec2 proposed = pose.position + unit_vector(heading) * (cfg.speed * dt);
  auto m = resolve_motion(*scene.world, pose.position, proposed, cfg.radius);
  const double moved = distance(m.position, pose.position);
  if (r.state.avoid_remaining > 0.0 && !(touch && state.avoid_remaining <= 0.0))
    r.state.avoid_remaining = std::max(0.0, r.state.avoid_remaining - cfg.speed * dt);
  r.state.kin.pose = {m.position, heading};
  r.state.kin.speed = moved / dt;
  r.state.kin.angular_rate = wrap_angle(heading - pose.heading) / dt;
  r.contacts = std::move(m.contacts);
  return r;
}

// --- episodes ------------------------------------------------------------------------------

enum class ContactSource : std::uint8_t { Body, Cane };

struct ContactEvent {
  double t = 0.0;
  std::string entity;
  ContactSource source = ContactSource::Body;
  bool operator==(const ContactEvent&) const = default;
};

struct TrajectorySample {
  double t = 0.0;
  Pose pose;
  bool operator==(const TrajectorySample&) const = default;
};

struct InstructionEvent {
  double t = 0.0;
  Instruction instruction = Instruction::Stop;
  bool operator==(const InstructionEvent&) const = default;
};

struct ZebraEvent {
  std::string light;
  double entered = 0.0;
  std::optional<double> exited;
  bool operator==(const ZebraEvent&) const = default;
};

struct EpisodeResult {
  AgentKind agent = AgentKind::System;
  std::uint64_t seed = 0;
  bool success = false;  // goal reached before max time
  double elapsed = 0.0;
  double max_time = 0.0;
  std::vector<TrajectorySample> trajectory;
  std::vector<ContactEvent> contacts;
  std::vector<InstructionEvent> instructions;
  std::vector<ZebraEvent> zebra_events;
  double distance = 0.0;
  double average_speed = 0.0;

  bool operator==(const EpisodeResult&) const = default;
};

/// Throws ConfigError before any simulation when inputs disagree.
inline void check_episode_inputs(const World& w, const RouteSpec& route, const EpisodeConfig& cfg) {
  if (route.waypoints.empty()) throw ValidationError("route: needs at least one waypoint");
  if (distance(route.final_goal(), w.goal) > 1e-6)
    throw ValidationError("route: final waypoint does not match the world goal");
  cfg.schedule.validate();
  if (!cfg.sensors.camera.valid()) throw ValidationError("sensors.camera: invalid parameters");
  if (!cfg.sensors.ultrasonic.valid())
    throw ValidationError("sensors.ultrasonic: half angle must be in (0, 45) degrees");
  if (!(cfg.system.speed > 0.0)) throw ValidationError("agent.system: speed must be > 0");
  if (cfg.system.latency < 0.0) throw ValidationError("agent.system: latency must be >= 0");
  if (!(cfg.baseline.reach > cfg.baseline.radius))
    throw ValidationError("agent.baseline: reach must exceed body radius");
  if (!(cfg.planner.replan_period > 0.0)) throw ValidationError("planner: replan period must be > 0");
  if (std::abs(cfg.planner.replan_period - cfg.schedule.planning_period) > 1e-9)
    throw ValidationError("planner.replan_period differs from schedule.planning_period");
  if (std::abs(cfg.planner.window_half_extent - cfg.perception.window_half_extent) > 1e-9)
    throw ValidationError("planner and perception window half extents differ");
}

/// Everything one planning tick produced; exposed for tests and debugging.
struct PlanningTick {
  DepthImage depth;
  std::vector<Detection> detections;
  UltrasonicReading echoes;
  std::vector<ObstacleEstimate> estimates;
  Costmap costmap;
  std::optional<Cell> local_goal;
  std::optional<PlanPath> plan;
  bool wait = false;
  Instruction instruction = Instruction::Stop;
};

/// Wait when the agent stands at the curb of a signalized zebra it must cross
/// next and that light is not seen green.
inline bool light_wait_flag(const World& w, const Vec2& position, const Vec2& target,
                            const std::map<std::string, LightPhase>& observed,
                            const PlannerConfig& cfg) {
  for (const auto& light : w.lights) {
    if (light.zebra.contains(position)) continue;
    if (light.zebra.distance_to(position) > cfg.stop_distance) continue;
    if (!segment_hits_rect(position, target, light.zebra)) continue;
    const auto it = observed.find(light.id);
    if (it == observed.end() || it->second != LightPhase::Green) return true;
  }
  return false;
}

inline void advance_route(RouteSpec& route, const Vec2& position, double arrive_radius) {
  while (route.current + 1 < route.waypoints.size() &&
         distance(position, route.waypoints[route.current]) <= arrive_radius)
    ++route.current;
}

inline constexpr double kCurbSetback = 0.6;

/// Point `setback` before the segment enters the zebra, or nullopt when the
/// segment misses it or starts inside it.
inline std::optional<Vec2> curb_point(const Vec2& from, const Vec2& to, const Rect& zebra,
                                      double setback) {
  if (zebra.contains(from)) return std::nullopt;
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len < 1e-12) return std::nullopt;
  const Vec2 u = d * (1.0 / len);
  const auto t = ray_rect(from, u, zebra);
  if (!t || *t > len) return std::nullopt;
  return from + u * std::max(0.0, *t - setback);
}

/// sense -> perceive -> plan -> instruct, at time t for the system agent.
inline PlanningTick planning_tick(const World& w, const Scene& scene, const KinematicState& state,
                                  RouteSpec& route, const EpisodeConfig& cfg, Rng& rng) {
  PlanningTick tick;
  const Pose& truth = state.pose;
  const ImuSample imu = sample_imu(state);
  const GpsFix gps = sample_gps(truth.position, cfg.sensors.gps_sigma, rng);
  const Pose estimate{gps.position, imu.heading};

  tick.depth = render_depth(scene, truth, cfg.sensors.camera, cfg.sensors.depth_noise, rng);
  SemanticObservation obs = observe_semantics(w, truth, cfg.perception, rng);
  // Georeference the egocentric window with the estimated position.
  obs.grid_origin += gps.position - truth.position;
  tick.detections = detect_objects(scene, truth, cfg.sensors.camera, cfg.perception, rng);
  tick.echoes = ping_ultrasonic(scene, truth, cfg.sensors.ultrasonic);

  std::vector<RangedDetection> ranged;
  std::map<std::string, LightPhase> observed;
  for (const auto& d : tick.detections) {
    if (d.cls == DetectClass::TrafficLight) {
      if (d.phase) observed[d.entity_id] = *d.phase;
      continue;
    }
    ranged.push_back({d, distance_from_detection(d, tick.depth, cfg.perception)});
  }
  tick.estimates = fuse_obstacles(ranged, tick.echoes, cfg.sensors.ultrasonic, cfg.sensors.camera,
                                  cfg.perception);

  std::vector<ZebraGate> gates;
  for (const auto& light : w.lights) {
    LightPhase phase = LightPhase::Red;
    if (const auto it = observed.find(light.id); it != observed.end()) phase = it->second;
    if (light.zebra.contains(truth.position)) phase = LightPhase::Green;  // committed
    gates.push_back({light.zebra, phase});
  }
  tick.costmap = build_costmap(obs, estimate, tick.estimates, gates, cfg.planner);
  const Cell start{obs.half_cells, obs.half_cells};
  if (tick.costmap.blocked(start))
    tick.costmap.set(start, std::max(cfg.planner.inflated_cost, cfg.planner.min_class_cost()));

  advance_route(route, estimate.position, cfg.planner.arrive_radius);
  // A crossing that is not open stages the agent at the curb instead of
  // letting the window boundary pull it along the roadway.
  RouteSpec leg{{route.target()}, 0};
  for (std::size_t i = 0; i < w.lights.size(); ++i) {
    if (gates[i].phase == LightPhase::Green) continue;
    if (const auto curb = curb_point(estimate.position, route.target(), w.lights[i].zebra,
                                     kCurbSetback)) {
      leg.waypoints[0] = *curb;
      break;
    }
  }
  tick.local_goal =
      select_local_goal(leg, estimate.position, tick.costmap, cfg.planner.arrive_radius);
  if (tick.local_goal) tick.plan = astar(tick.costmap, start, *tick.local_goal);
  tick.wait = light_wait_flag(w, truth.position, route.target(), observed, cfg.planner);
  tick.instruction = make_instruction(tick.plan, estimate, tick.estimates, tick.wait,
                                      route.final_goal(), cfg.planner);
  // Waiting at the curb faces the crossing; otherwise the signal head can sit
  // outside the camera view and the light is never seen turning green.
  if (tick.instruction == Instruction::Wait) {
    const double off = wrap_angle(bearing_to(estimate.position, route.target()) - estimate.heading);
    if (off > cfg.planner.straight_threshold) tick.instruction = Instruction::TurnLeft;
    if (off < -cfg.planner.straight_threshold) tick.instruction = Instruction::TurnRight;
  }
  return tick;
}

namespace detail {

/// Opens one event per entity per continuous overlap interval.
class ContactTracker {
 public:
  void update(double t, ContactSource source, const std::vector<std::string>& now,
              std::vector<ContactEvent>& events) {
    auto& active = active_[static_cast<int>(source)];
    std::set<std::string> next(now.begin(), now.end());
    for (const auto& id : next)
      if (!active.count(id)) events.push_back({t, id, source});
    active = std::move(next);
  }

 private:
  std::set<std::string> active_[2];
};

class ZebraTracker {
 public:
  void update(const World& w, double t, const Vec2& p, std::vector<ZebraEvent>& events) {
    for (const auto& light : w.lights) {
      const bool inside = light.zebra.contains(p);
      bool& was = inside_[light.id];
      if (inside && !was) events.push_back({light.id, t, std::nullopt});
      if (!inside && was) {
        for (auto it = events.rbegin(); it != events.rend(); ++it)
          if (it->light == light.id && !it->exited) {
            it->exited = t;
            break;
          }
      }
      was = inside;
    }
  }

 private:
  std::map<std::string, bool> inside_;
};

}  // namespace detail

inline EpisodeResult run_episode(const World& w, const RouteSpec& route_in,
                                 const EpisodeConfig& cfg, std::uint64_t seed, AgentKind kind) {
  check_episode_inputs(w, route_in, cfg);
  RouteSpec route = route_in;
  route.current = 0;
  Rng rng(seed);
  const TickSchedule& sched = cfg.schedule;
  const double dt = sched.time_at(1);
  const int plan_every = sched.steps_per_plan();
  const auto latency_steps =
      static_cast<std::int64_t>(std::ceil(cfg.system.latency / dt - 1e-9));
  const double arrive = cfg.planner.arrive_radius;

  EpisodeResult res;
  res.agent = kind;
  res.seed = seed;
  res.max_time = sched.max_time;
  KinematicState kin{w.start, 0.0, 0.0};
  BaselineState base{kin, 0.0};
  res.trajectory.push_back({0.0, kin.pose});

  Instruction active = Instruction::Wait;
  std::deque<std::pair<std::int64_t, Instruction>> pending;
  detail::ContactTracker contacts;
  detail::ZebraTracker zebras;
  zebras.update(w, 0.0, kin.pose.position, res.zebra_events);
  const double body_radius = kind == AgentKind::System ? cfg.system.radius : cfg.baseline.radius;

  const std::int64_t total = sched.total_steps();
  for (std::int64_t n = 0; n < total; ++n) {
    const double t = sched.time_at(n);
    const double t1 = sched.time_at(n + 1);
    std::vector<std::string> body;
    std::vector<std::string> cane;

    if (kind == AgentKind::System) {
      if (n % plan_every == 0) {
        const Scene scene = make_scene(w, t);
        const auto tick = planning_tick(w, scene, kin, route, cfg, rng);
        res.instructions.push_back({t, tick.instruction});
        pending.emplace_back(n + latency_steps, tick.instruction);
      }
      while (!pending.empty() && pending.front().first <= n) {
        active = pending.front().second;
        pending.pop_front();
      }
      auto step = step_system_agent(kin, active, dt, w, cfg.system, rng);
      kin = step.state;
      body = std::move(step.contacts);
    } else {
      while (route.current + 1 < route.waypoints.size() &&
             distance(base.kin.pose.position, route.waypoints[route.current]) <= arrive)
        ++route.current;
      const Scene scene = make_scene(w, t);
      auto step = step_baseline_agent(base, scene, route.target(), dt, cfg.baseline, rng);
      base = step.state;
      kin = base.kin;
      body = std::move(step.contacts);
      cane = std::move(step.cane_contacts);
    }

    for (const auto& a : w.dynamics)
      if (distance(kin.pose.position, dynamic_position(a, t1)) < body_radius + a.radius)
        body.push_back(a.id);
    contacts.update(t1, ContactSource::Body, body, res.contacts);
    contacts.update(t1, ContactSource::Cane, cane, res.contacts);

    res.distance += distance(res.trajectory.back().pose.position, kin.pose.position);
    res.trajectory.push_back({t1, kin.pose});
    zebras.update(w, t1, kin.pose.position, res.zebra_events);

    if (distance(kin.pose.position, w.goal) <= arrive) {
      res.success = true;
      res.elapsed = t1;
      break;
    }
  }
  if (!res.success) res.elapsed = sched.time_at(total);
  res.average_speed = res.elapsed > 0.0 ? res.distance / res.elapsed : 0.0;
  return res;
}

}  // namespace openwalk

#endif  // OPENWALK_AGENT_HPP
