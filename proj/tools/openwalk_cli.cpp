// openwalk command line: run scenario batches, validate worlds, replay logs.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "openwalk/openwalk.hpp"

namespace fs = std::filesystem;
using namespace openwalk;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

struct RunOptions {
  std::string scenario;
  std::string agent = "system";
  int runs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = ".";
  bool no_noise = false;
  bool svg = false;
  std::string config;
  bool debug_depth = false;
};

ScenarioSpec resolve_scenario(const RunOptions& o) {
  ScenarioSpec s;
  if (is_scenario_name(o.scenario)) {
    s = build_scenario(o.scenario);
    if (!o.config.empty()) {
      const auto doc = jsonutil::parse_document(read_text_file(o.config), "config");
      jsonutil::require_schema(doc, kConfigSchema, "config");
      apply_config_blocks(doc, s);
    }
  } else if (fs::exists(o.scenario)) {
    s = load_config_file(o.scenario);
    if (!o.config.empty()) throw ConfigError("--config cannot be combined with a config path scenario");
  } else {
    throw ConfigError("unknown scenario '" + o.scenario + "' (not a scenario name or config file)");
  }
  ScenarioOverrides ov;
  if (o.runs > 0) ov.runs = o.runs;
  if (o.seed_set) ov.seed_base = o.seed;
  ov.agent = o.agent == "baseline" ? AgentKind::Baseline : AgentKind::System;
  ov.no_noise = o.no_noise;
  s = apply_overrides(std::move(s), ov);
  s.validate();
  return s;
}

int cmd_run(const RunOptions& o) {
  const ScenarioSpec spec = resolve_scenario(o);
  fs::create_directories(o.out);
  const fs::path dir(o.out);

  if (o.debug_depth) {
    // Depth of the first planning tick of each run, as text grids.
    for (int i = 0; i < spec.runs; ++i) {
      Rng rng(spec.seed_base + static_cast<std::uint64_t>(i));
      RouteSpec route = spec.route;
      KinematicState k{spec.world.start, 0.0, 0.0};
      const auto tick = planning_tick(spec.world, make_scene(spec.world, 0.0), k, route, spec.config, rng);
      write_text_file((dir / ("depth_run" + std::to_string(i) + ".txt")).string(), depth_to_text(tick.depth));
    }
  }
  const BatchOutcome out = run_batch(spec, [&](int run, const EpisodeResult& r) {
    write_text_file((dir / ("episode_" + std::to_string(run) + ".jsonl")).string(),
                    episode_log_text(spec.world, r));
  });
  export_metrics(out.metrics, MetricsFormat::Csv, (dir / "metrics.csv").string());
  export_metrics(out.metrics, MetricsFormat::Json, (dir / "metrics.json").string());
  if (o.svg)
    write_text_file((dir / "trajectories.svg").string(), render_trajectory_svg(spec.world, out.results));

  const auto& m = out.metrics;
  std::printf("%s %s runs=%d success_rate=%s avg_speed=%s avg_contacts=%s avg_time=%s\n",
              m.scenario.c_str(), std::string(agent_kind_name(m.agent)).c_str(), m.runs,
              format_number(m.success_rate).c_str(), format_number(m.avg_speed).c_str(),
              format_number(m.avg_contacts).c_str(), format_number(m.avg_time).c_str());
  return kOk;
}

int cmd_validate(const std::string& path) {
  const World w = load_world_file(path);
  std::printf("ok: %dx%d cells, %zu obstacles, %zu dynamic agents, %zu lights\n", w.grid.width(),
              w.grid.height(), w.obstacles.size(), w.dynamics.size(), w.lights.size());
  return kOk;
}

int cmd_replay(const std::string& log_path, const std::string& svg_path) {
  const EpisodeLog log = parse_episode_log(read_text_file(log_path));
  write_text_file(svg_path, render_trajectory_svg(log.world, {log.result}));
  std::printf("replayed %zu samples, %zu contacts -> %s\n", log.result.trajectory.size(),
              log.result.contacts.size(), svg_path.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"openwalk: assistive navigation simulator"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "run a scenario batch");
  run->add_option("--scenario", ro.scenario, "navigate, obstacles, intersection, or a config file")
      ->required();
  run->add_option("--agent", ro.agent, "system or baseline")
      ->check(CLI::IsMember({"system", "baseline"}));
  run->add_option("--runs", ro.runs, "episodes (default: scenario's)")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", ro.seed, "seed of the first run");
  run->add_option("--out", ro.out, "output directory");
  run->add_flag("--no-noise", ro.no_noise, "disable sensing, perception and execution noise");
  run->add_flag("--svg", ro.svg, "write trajectories.svg");
  run->add_option("--config", ro.config, "config file applied over a named scenario");
  run->add_flag("--debug-depth", ro.debug_depth, "dump first-tick depth images as text");

  std::string world_path;
  auto* validate = app.add_subcommand("validate", "check a world file");
  validate->add_option("--world", world_path, "world file")->required();

  std::string log_path, svg_path;
  auto* replay = app.add_subcommand("replay", "plot an episode log");
  replay->add_option("--log", log_path, "episode log (.jsonl)")->required();
  replay->add_option("--svg", svg_path, "output svg")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      ro.seed_set = seed_opt->count() > 0;
      return cmd_run(ro);
    }
    if (*validate) return cmd_validate(world_path);
    if (*replay) return cmd_replay(log_path, svg_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
