#ifndef OPENWALK_HARNESS_HPP
#define OPENWALK_HARNESS_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "openwalk/agent.hpp"
#include "openwalk/error.hpp"
#include "openwalk/scenarios.hpp"

namespace openwalk {

struct RunRow {
  int run = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double avg_speed = 0.0;
  int contacts = 0;
  double time = 0.0;  // max time when the run failed
  double distance = 0.0;
  bool operator==(const RunRow&) const = default;
};

struct BatchMetrics {
  std::string scenario;
  AgentKind agent = AgentKind::System;
  int runs = 0;
  double success_rate = 0.0;
  double avg_speed = 0.0;
  double avg_contacts = 0.0;
  double avg_time = 0.0;
  std::vector<RunRow> rows;
  bool operator==(const BatchMetrics&) const = default;
};

struct BatchOutcome {
  BatchMetrics metrics;
  std::vector<EpisodeResult> results;
};

inline RunRow make_row(const ScenarioSpec& s, int run, const EpisodeResult& r) {
  RunRow row;
  row.run = run;
  row.seed = r.seed;
  row.success = scenario_success(s, r);
  row.avg_speed = r.average_speed;
  row.contacts = static_cast<int>(r.contacts.size());
  row.time = row.success ? r.elapsed : r.max_time;
  row.distance = r.distance;
  return row;
}

/// Aggregates over all rows in order; failures count at max time.
inline BatchMetrics aggregate(std::string scenario, AgentKind agent, std::vector<RunRow> rows) {
  BatchMetrics m;
  m.scenario = std::move(scenario);
  m.agent = agent;
  m.runs = static_cast<int>(rows.size());
  if (rows.empty()) throw ValidationError("batch: runs must be >= 1");
  double ok = 0, speed = 0, contacts = 0, time = 0;
  for (const auto& r : rows) {
    ok += r.success ? 1.0 : 0.0;
    speed += r.avg_speed;
    contacts += r.contacts;
    time += r.time;
  }
  const double n = static_cast<double>(rows.size());
  m.success_rate = ok / n;
  m.avg_speed = speed / n;
  m.avg_contacts = contacts / n;
  m.avg_time = time / n;
  m.rows = std::move(rows);
  return m;
}

using EpisodeObserver = std::function<void(int run, const EpisodeResult&)>;

inline BatchOutcome run_batch(const ScenarioSpec& s, const EpisodeObserver& observer = {}) {
  s.validate();
  BatchOutcome out;
  std::vector<RunRow> rows;
  for (int i = 0; i < s.runs; ++i) {
    const std::uint64_t seed = s.seed_base + static_cast<std::uint64_t>(i);
    auto r = run_episode(s.world, s.route, s.config, seed, s.agent);
    rows.push_back(make_row(s, i, r));
    if (observer) observer(i, r);
    out.results.push_back(std::move(r));
  }
  out.metrics = aggregate(s.name, s.agent, std::move(rows));
  return out;
}

// --- export --------------------------------------------------------------------------------

/// Shortest round-trip decimal, always with a fractional part ("1.0").
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline constexpr const char* kMetricsHeader =
    "scenario,agent,runs,success_rate,avg_speed_mps,avg_contacts,avg_time_s";
inline constexpr const char* kRunsHeader = "run,seed,success,avg_speed_mps,contacts,time_s,distance_m";

inline std::string metrics_csv(const BatchMetrics& m) {
  std::ostringstream os;
  os << kMetricsHeader << '\n'
     << m.scenario << ',' << agent_kind_name(m.agent) << ',' << m.runs << ','
     << format_number(m.success_rate) << ',' << format_number(m.avg_speed) << ','
     << format_number(m.avg_contacts) << ',' << format_number(m.avg_time) << "\n\n"
     << kRunsHeader << '\n';
  for (const auto& r : m.rows)
    os << r.run << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << format_number(r.avg_speed)
       << ',' << r.contacts << ',' << format_number(r.time) << ',' << format_number(r.distance)
       << '\n';
  return os.str();
}

/// Reads the per-run section of a metrics CSV.
inline std::vector<RunRow> parse_run_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  bool in_runs = false;
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line == kRunsHeader) {
      in_runs = true;
      continue;
    }
    if (!in_runs || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw ParseError("metrics csv: bad run row '" + line + "'");
    RunRow r;
    r.run = std::stoi(f[0]);
    r.seed = std::stoull(f[1]);
    r.success = f[2] == "1";
    r.avg_speed = std::stod(f[3]);
    r.contacts = std::stoi(f[4]);
    r.time = std::stod(f[5]);
    r.distance = std::stod(f[6]);
    rows.push_back(r);
  }
  return rows;
}

inline nlohmann::json metrics_to_json(const BatchMetrics& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.rows)
    rows.push_back({{"run", r.run},
                    {"seed", r.seed},
                    {"success", r.success},
                    {"avg_speed_mps", r.avg_speed},
                    {"contacts", r.contacts},
                    {"time_s", r.time},
                    {"distance_m", r.distance}});
  return {{"scenario", m.scenario},
          {"agent", std::string(agent_kind_name(m.agent))},
          {"runs", m.runs},
          {"success_rate", m.success_rate},
          {"avg_speed_mps", m.avg_speed},
          {"avg_contacts", m.avg_contacts},
          {"avg_time_s", m.avg_time},
          {"per_run", std::move(rows)}};
}

inline BatchMetrics metrics_from_json(const nlohmann::json& j) {
  BatchMetrics m;
  try {
    m.scenario = j.at("scenario").get<std::string>();
    const auto agent = j.at("agent").get<std::string>();
    if (agent != "system" && agent != "baseline") throw ParseError("metrics: unknown agent " + agent);
    m.agent = agent == "system" ? AgentKind::System : AgentKind::Baseline;
    m.runs = j.at("runs").get<int>();
    m.success_rate = j.at("success_rate").get<double>();
    m.avg_speed = j.at("avg_speed_mps").get<double>();
    m.avg_contacts = j.at("avg_contacts").get<double>();
    m.avg_time = j.at("avg_time_s").get<double>();
    for (const auto& r : j.at("per_run"))
      m.rows.push_back({r.at("run").get<int>(), r.at("seed").get<std::uint64_t>(),
                        r.at("success").get<bool>(), r.at("avg_speed_mps").get<double>(),
                        r.at("contacts").get<int>(), r.at("time_s").get<double>(),
                        r.at("distance_m").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metrics json: ") + e.what());
  }
  return m;
}

inline std::string metrics_json_text(const BatchMetrics& m) { return metrics_to_json(m).dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw std::system_error(errno, std::generic_category(), "write failed for '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

enum class MetricsFormat { Csv, Json };

inline void export_metrics(const BatchMetrics& m, MetricsFormat f, const std::string& path) {
  write_text_file(path, f == MetricsFormat::Csv ? metrics_csv(m) : metrics_json_text(m));
}

// --- trajectory analysis ---------------------------------------------------------------------

inline double path_length(const std::vector<TrajectorySample>& traj, std::size_t end) {
  double len = 0.0;
  for (std::size_t i = 1; i < std::min(end, traj.size()); ++i)
    len += distance(traj[i - 1].pose.position, traj[i].pose.position);
  return len;
}

/// Arc-length coordinate of the projection of p onto a polyline.
inline double route_progress(const std::vector<Vec2>& line, const Vec2& p) {
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double s0 = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Vec2 a = line[i - 1];
    const Vec2 ab = line[i] - a;
    const double len = ab.norm();
    double u = len > 0 ? std::clamp((p - a).dot(ab) / (len * len), 0.0, 1.0) : 0.0;
    const double d = distance(p, a + ab * u);
    if (d < best_d) {
      best_d = d;
      best_s = s0 + u * len;
    }
    s0 += len;
  }
  return best_s;
}

/// Path lengths of two trajectories up to the first sample at which each
/// reaches the route progress both of them attain.
inline std::pair<double, double> common_progress_lengths(const std::vector<Vec2>& route_line,
                                                         const std::vector<TrajectorySample>& a,
                                                         const std::vector<TrajectorySample>& b) {
  auto max_progress = [&](const std::vector<TrajectorySample>& t) {
    double m = 0.0;
    for (const auto& s : t) m = std::max(m, route_progress(route_line, s.pose.position));
    return m;
  };
  const double target = std::min(max_progress(a), max_progress(b));
  auto length_to = [&](const std::vector<TrajectorySample>& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (route_progress(route_line, t[i].pose.position) >= target) return path_length(t, i + 1);
    return path_length(t, t.size());
  };
  return {length_to(a), length_to(b)};
}

}  // namespace openwalk

#endif  // OPENWALK_HARNESS_HPP
