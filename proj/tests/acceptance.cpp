// Scenario-level and property-level acceptance checks. Prints one PASS/FAIL
// line per criterion and exits nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "openwalk/openwalk.hpp"
#include "oracles.hpp"

using namespace openwalk;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Verdict astar_optimality() {
  std::mt19937_64 gen(20240101);
  int mismatches = 0, reachable = 0;
  double astar_time = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Costmap m = oracle::random_costmap(gen);
    const Cell s = oracle::random_free_cell(m, gen), t = oracle::random_free_cell(m, gen);
    const auto t0 = Clock::now();
    const auto got = astar(m, s, t);
    astar_time += seconds_since(t0);
    const auto want = oracle::shortest(m, s, t);
    if (got.has_value() != want.has_value() || (got && got->cost_units != *want)) ++mismatches;
    reachable += want.has_value();
  }
  return {mismatches == 0 && astar_time < 5.0,
          std::to_string(mismatches) + " mismatches on 100 maps (" + std::to_string(reachable) +
              " reachable), astar " + fmt("%.3f s", astar_time)};
}

Verdict heuristic_admissible() {
  std::mt19937_64 gen(20240101);
  std::size_t checked = 0, violations = 0;
  for (int i = 0; i < 10; ++i) {
    const Costmap m = oracle::random_costmap(gen);
    const Cell s = oracle::random_free_cell(m, gen), t = oracle::random_free_cell(m, gen);
    AStarTrace trace;
    astar(m, s, t, &trace);
    const auto rest = oracle::dijkstra(m, t, true);
    for (const Cell& c : trace.expanded) {
      const auto d = rest[static_cast<std::size_t>(c.y) * m.width() + c.x];
      if (d == oracle::kInf) continue;
      ++checked;
      violations += heuristic_units(m, c, t) > d;
    }
  }
  return {violations == 0 && checked > 0,
          std::to_string(violations) + " violations over " + std::to_string(checked) + " expanded nodes"};
}

Verdict completion() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(0.3, 6.0), dens(0.01, 0.4);
  int bad = 0, skipped = 0;
  for (int i = 0; i < 1000; ++i) {
    CameraParams cam;
    cam.width = cam.height = 16;
    DepthImage img(cam);
    const double p = dens(gen);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        if (u(gen) < p) img.set(x, y, v(gen));
    const auto out = complete_depth(img);
    const auto ref = oracle::complete(img);
    if (!out || !ref) {
      skipped += !out && !ref;
      bad += out.has_value() != ref.has_value();
      continue;
    }
    bool ok = out->valid_count() == 256 && out->values == ref->values;
    for (std::size_t k = 0; k < img.values.size(); ++k)
      if (img.valid[k] && out->values[k] != img.values[k]) ok = false;
    const auto again = complete_depth(*out);
    ok = ok && again && again->values == out->values;
    bad += !ok;
  }
  return {bad == 0, std::to_string(bad) + " failures on 1000 images (" + std::to_string(skipped) +
                        " all-invalid handled as no-depth)"};
}

Verdict fusion_min_rule() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> bearing(-0.76, 0.76), range(0.3, 6.0), u(0.0, 1.0);
  const UltrasonicArray arr;
  const CameraParams cam;
  const PerceptionConfig cfg;
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    Detection d;
    d.cls = DetectClass::Person;
    d.bearing = bearing(gen);
    d.col_min = d.col_max = 31;
    const double vision = range(gen);
    UltrasonicReading echoes;
    for (auto& e : echoes.distance)
      if (u(gen) < 0.5) e = std::min(range(gen), arr.max_range);
    const auto with = fuse_obstacles({{d, vision}}, echoes, arr, cam, cfg);
    const auto without = fuse_obstacles({{d, vision}}, {}, arr, cam, cfg);
    // Independent expectation: min over the vision value and every echo in tolerance.
    double want = vision;
    for (int s = 0; s < kUltrasonicCount; ++s) {
      const auto& e = echoes.distance[static_cast<std::size_t>(s)];
      if (e && std::abs(wrap_angle(arr.headings[static_cast<std::size_t>(s)] - d.bearing)) <=
                   cfg.bearing_tolerance + 1e-12)
        want = std::min(want, *e);
    }
    const ObstacleEstimate* fused = nullptr;
    for (const auto& e : with)
      if (e.sources & kSourceVision) fused = &e;
    if (!fused || fused->distance != want || without.size() != 1 || without[0].distance < fused->distance)
      ++bad;
  }
  return {bad == 0, std::to_string(bad) + " violations over 10000 triples"};
}

Verdict light_phase_exhaustive() {
  TrafficLight l;
  l.id = "l";
  l.green = 60;
  l.red = 30;
  int bad = 0;
  for (int k = 0; k <= 3000; ++k) {
    const bool green = (k % 900) < 600;  // tenths of a second
    bad += (light_phase(l, k / 10.0) == LightPhase::Green) != green;
  }
  const bool boundaries = light_phase(l, 0.0) == LightPhase::Green &&
                          light_phase(l, 60.0) == LightPhase::Red &&
                          light_phase(l, 90.0) == LightPhase::Green;
  return {bad == 0 && boundaries, std::to_string(bad) + " mismatches over 3001 instants"};
}

Verdict intersection_envelope() {
  ScenarioOverrides o;
  o.runs = 20;
  o.no_noise = true;
  const auto out = run_batch(build_scenario("intersection", o));
  double lo = 1e9, hi = 0;
  for (const auto& r : out.metrics.rows) {
    lo = std::min(lo, r.time);
    hi = std::max(hi, r.time);
  }
  const bool ok = out.metrics.success_rate == 1.0 && lo >= 25.0 && hi <= 60.0;
  return {ok, "success " + format_number(out.metrics.success_rate) + ", time " + fmt("%.1f", lo) +
                  ".." + fmt("%.1f s", hi) + " (avg " + fmt("%.1f s)", out.metrics.avg_time)};
}

Verdict obstacle_contacts() {
  ScenarioOverrides o;
  o.runs = 20;
  o.no_noise = true;
  const auto sys = run_batch(build_scenario("obstacles", o)).metrics;
  o.agent = AgentKind::Baseline;
  const auto base = run_batch(build_scenario("obstacles", o)).metrics;
  const bool ok = sys.avg_contacts == 0.0 && sys.success_rate == 1.0 && base.avg_contacts >= 1.0 &&
                  base.avg_contacts > sys.avg_contacts;
  return {ok, "system success " + format_number(sys.success_rate) + " contacts " +
                  format_number(sys.avg_contacts) + "; baseline contacts " + format_number(base.avg_contacts)};
}

Verdict navigate_ordinal() {
  ScenarioOverrides o;
  o.runs = 20;
  const auto sys_spec = build_scenario("navigate", o);
  o.agent = AgentKind::Baseline;
  const auto base_spec = build_scenario("navigate", o);
  const auto sys = run_batch(sys_spec);
  const auto base = run_batch(base_spec);
  std::vector<Vec2> line{sys_spec.world.start.position};
  line.insert(line.end(), sys_spec.route.waypoints.begin(), sys_spec.route.waypoints.end());
  int zigzag = 0;
  double min_ratio = 1e9;
  for (std::size_t i = 0; i < sys.results.size(); ++i) {
    const auto [ls, lb] = common_progress_lengths(line, sys.results[i].trajectory, base.results[i].trajectory);
    zigzag += lb > ls;
    min_ratio = std::min(min_ratio, lb / ls);
  }
  const auto& m = sys.metrics;
  const bool ok = m.success_rate >= base.metrics.success_rate && m.avg_speed >= 0.1 &&
                  m.avg_speed <= 0.4 && zigzag == static_cast<int>(sys.results.size());
  return {ok, "success " + format_number(m.success_rate) + " vs " + format_number(base.metrics.success_rate) +
                  ", speed " + fmt("%.3f m/s", m.avg_speed) + ", baseline longer on " +
                  std::to_string(zigzag) + "/20 (min ratio " + fmt("%.3f)", min_ratio)};
}

Verdict determinism() {
  bool ok = true;
  for (auto name : kScenarioNames) {
    ScenarioOverrides o;
    o.runs = 2;
    o.max_time = 120.0;
    const auto s = build_scenario(name, o);
    const auto a = run_batch(s);
    const auto b = run_batch(s);
    ok = ok && metrics_csv(a.metrics) == metrics_csv(b.metrics) &&
         render_trajectory_svg(s.world, a.results) == render_trajectory_svg(s.world, b.results);
  }
  return {ok, ok ? "CSV and SVG identical for all scenarios" : "outputs differ"};
}

Verdict tick_discipline() {
  // Goal walled off so the episode runs its full 300 s.
  World w;
  w.grid = SemanticGrid(100, 30, 0.1, {0, 0}, SemanticClass::Sidewalk);
  w.grid.paint({{5.0, 0}, {5.3, 3}}, SemanticClass::ObstacleFixed);
  w.start = {{1.0, 1.5}, 0.0};
  w.goal = {8.0, 1.5};
  EpisodeConfig cfg;
  cfg.schedule.max_time = 300.0;
  const auto r = run_episode(w, RouteSpec{{w.goal}, 0}, cfg, 11, AgentKind::System);
  const auto log = parse_episode_log(episode_log_text(w, r));
  const auto& ins = log.result.instructions;
  bool ok = ins.size() == 600 && log.result.elapsed == 300.0;
  for (std::size_t i = 0; ok && i < ins.size(); ++i) ok = ins[i].t == 0.5 * static_cast<double>(i);
  return {ok, std::to_string(ins.size()) + " planning events, last at " +
                  fmt("%.1f s", ins.empty() ? 0.0 : ins.back().t)};
}

Verdict navigate_runtime() {
  ScenarioOverrides o;
  o.runs = 20;
  const auto spec = build_scenario("navigate", o);
  const auto t0 = Clock::now();
  const auto out = run_batch(spec);
  const double wall = seconds_since(t0);
  double min_sim = 1e9;
  for (const auto& r : out.metrics.rows) min_sim = std::min(min_sim, r.time);
  return {wall < 60.0 && min_sim >= 200.0,
          fmt("%.2f s wall", wall) + ", shortest run " + fmt("%.1f s simulated", min_sim)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"astar cost equals dijkstra", astar_optimality},
      {"heuristic admissible", heuristic_admissible},
      {"depth completion matches oracle", completion},
      {"fusion min rule", fusion_min_rule},
      {"light phase arithmetic", light_phase_exhaustive},
      {"intersection envelope", intersection_envelope},
      {"obstacle contacts", obstacle_contacts},
      {"navigate ordinal", navigate_ordinal},
      {"determinism", determinism},
      {"tick discipline", tick_discipline},
      {"navigate batch runtime", navigate_runtime},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    const Verdict v = criteria[i].second();
    failed += !v.pass;
    std::printf("%s %2zu %-34s %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
