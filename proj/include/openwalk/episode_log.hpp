#ifndef OPENWALK_EPISODE_LOG_HPP
#define OPENWALK_EPISODE_LOG_HPP

#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "openwalk/agent.hpp"
#include "openwalk/error.hpp"
#include "openwalk/json_util.hpp"
#include "openwalk/world_io.hpp"

namespace openwalk {

inline constexpr std::string_view kLogSchema = "openwalk-log/1";

struct EpisodeLog {
  World world;
  EpisodeResult result;
};

/// One header line, then one record per trajectory sample. Instructions and
/// contacts are attached to the sample with the same timestamp.
inline std::string episode_log_text(const World& w, const EpisodeResult& r) {
  nlohmann::json header = {{"schema", kLogSchema},
                           {"agent", std::string(agent_kind_name(r.agent))},
                           {"seed", r.seed},
                           {"success", r.success},
                           {"elapsed", r.elapsed},
                           {"max_time", r.max_time},
                           {"world", world_to_json(w)}};
  std::string out = header.dump() + "\n";
  std::size_t ii = 0;
  std::size_t ci = 0;
  for (const auto& s : r.trajectory) {
    nlohmann::json rec = {{"t", s.t},
                          {"x", s.pose.position.x},
                          {"y", s.pose.position.y},
                          {"heading", s.pose.heading}};
    if (ii < r.instructions.size() && r.instructions[ii].t == s.t) {
      rec["instruction"] = std::string(instruction_name(r.instructions[ii].instruction));
      ++ii;
    }
    nlohmann::json contacts = nlohmann::json::array();
    while (ci < r.contacts.size() && r.contacts[ci].t == s.t) {
      contacts.push_back({{"id", r.contacts[ci].entity},
                          {"source", r.contacts[ci].source == ContactSource::Body ? "body" : "cane"}});
      ++ci;
    }
    rec["contacts"] = std::move(contacts);
    out += rec.dump() + "\n";
  }
  return out;
}

inline EpisodeLog parse_episode_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("log: empty");
  EpisodeLog log;
  auto& r = log.result;
  try {
    const auto header = jsonutil::parse_document(line, "log header");
    jsonutil::require_schema(header, kLogSchema, "log");
    log.world = world_from_json(header.at("world"));
    r.agent = header.at("agent").get<std::string>() == "baseline" ? AgentKind::Baseline
                                                                   : AgentKind::System;
    r.seed = header.at("seed").get<std::uint64_t>();
    r.success = header.at("success").get<bool>();
    r.elapsed = header.at("elapsed").get<double>();
    r.max_time = header.at("max_time").get<double>();
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("log line " + std::to_string(lineno) + ": " + e.what());
      }
      TrajectorySample s{rec.at("t").get<double>(),
                         {{rec.at("x").get<double>(), rec.at("y").get<double>()},
                          rec.at("heading").get<double>()}};
      if (!r.trajectory.empty())
        r.distance += distance(r.trajectory.back().pose.position, s.pose.position);
      r.trajectory.push_back(s);
      if (rec.contains("instruction")) {
        const auto name = rec["instruction"].get<std::string>();
        const auto ins = instruction_from_name(name);
        if (!ins) throw ParseError("log line " + std::to_string(lineno) + ": unknown instruction " + name);
        r.instructions.push_back({s.t, *ins});
      }
      for (const auto& c : rec.at("contacts"))
        r.contacts.push_back({s.t, c.at("id").get<std::string>(),
                              c.at("source").get<std::string>() == "cane" ? ContactSource::Cane
                                                                           : ContactSource::Body});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("log: ") + e.what());
  }
  r.average_speed = r.elapsed > 0.0 ? r.distance / r.elapsed : 0.0;
  return log;
}

// --- depth text grids ------------------------------------------------------------------

/// "width height" then one line per row; -1 marks an invalid pixel.
inline std::string depth_to_text(const DepthImage& img) {
  std::string out = std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n";
  char buf[64];
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (c) out += ' ';
      if (!img.is_valid(c, r)) {
        out += "-1";
        continue;
      }
      const auto res = std::to_chars(buf, buf + sizeof buf, img.at(c, r));
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

inline DepthImage depth_from_text(std::string_view text, CameraParams cam = {}) {
  std::istringstream in{std::string(text)};
  int w = 0, h = 0;
  if (!(in >> w >> h) || w <= 0 || h <= 0) throw ParseError("depth: bad size line");
  cam.width = w;
  cam.height = h;
  DepthImage img(cam);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::string tok;
      if (!(in >> tok))
        throw ParseError("depth: missing value at row " + std::to_string(r) + " col " + std::to_string(c));
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError("depth: bad value '" + tok + "' at row " + std::to_string(r));
      if (v >= 0.0) img.set(c, r, v);
    }
  }
  return img;
}

}  // namespace openwalk

#endif  // OPENWALK_EPISODE_LOG_HPP
