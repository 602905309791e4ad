#ifndef OPENWALK_WORLD_IO_HPP
#define OPENWALK_WORLD_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "openwalk/json_util.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

inline constexpr std::string_view kWorldSchema = "openwalk-world/1";

namespace detail {

inline SemanticClass parse_class(const nlohmann::json& j, const std::string& path) {
  const auto s = jsonutil::as_string(j, path);
  if (s.size() != 1 || !class_from_char(s[0]))
    throw ParseError(path + ": unknown class '" + s + "' (expected one of B S Z R X .)");
  return *class_from_char(s[0]);
}

inline Rect parse_rect(const nlohmann::json& j, const std::string& path) {
  using namespace jsonutil;
  return {as_vec2(require(j, "min", path), child(path, "min")),
          as_vec2(require(j, "max", path), child(path, "max"))};
}

inline SemanticGrid parse_grid(const nlohmann::json& g) {
  using namespace jsonutil;
  const std::string path = "grid";
  const double res = number_or(g, "resolution", path, 0.1);
  const Vec2 origin = g.contains("origin") ? as_vec2(g["origin"], "grid.origin") : Vec2{};
  if (!(res > 0.0)) throw ValidationError("grid: resolution must be > 0");

  if (g.contains("rows")) {
    const auto& rows = as_array(g["rows"], "grid.rows");
    if (rows.empty()) throw ValidationError("grid: rows must not be empty");
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(as_string(rows[0], "grid.rows[0]").size());
    if (w == 0) throw ValidationError("grid: rows must not be empty");
    SemanticGrid grid(w, h, res, origin);
    // First row is the top (largest y).
    for (int r = 0; r < h; ++r) {
      const auto rp = item("grid.rows", static_cast<std::size_t>(r));
      const auto line = as_string(rows[static_cast<std::size_t>(r)], rp);
      if (static_cast<int>(line.size()) != w)
        throw ValidationError(rp + ": row length " + std::to_string(line.size()) +
                              " differs from width " + std::to_string(w));
      for (int x = 0; x < w; ++x) {
        const auto c = class_from_char(line[static_cast<std::size_t>(x)]);
        if (!c)
          throw ParseError(rp + ": unknown class char '" +
                           std::string(1, line[static_cast<std::size_t>(x)]) + "' at column " +
                           std::to_string(x));
        grid.set({x, h - 1 - r}, *c);
      }
    }
    return grid;
  }

  const int w = as_int(require(g, "width", path), "grid.width");
  const int h = as_int(require(g, "height", path), "grid.height");
  if (w <= 0 || h <= 0) throw ValidationError("grid: width and height must be positive");
  const SemanticClass fill = parse_class(require(g, "fill", path), "grid.fill");
  SemanticGrid grid(w, h, res, origin, fill);
  if (g.contains("paint")) {
    const auto& paints = as_array(g["paint"], "grid.paint");
    for (std::size_t i = 0; i < paints.size(); ++i) {
      const auto pp = item("grid.paint", i);
      const auto cls = parse_class(require(paints[i], "class", pp), child(pp, "class"));
      const Rect r = parse_rect(paints[i], pp);
      if (!(r.min.x < r.max.x && r.min.y < r.max.y))
        throw ValidationError(pp + ": min must be < max");
      grid.paint(r, cls);
    }
  }
  return grid;
}

}  // namespace detail

/// Builds a World from a parsed document; throws ParseError/ValidationError.
inline World world_from_json(const nlohmann::json& doc) {
  using namespace jsonutil;
  require_schema(doc, kWorldSchema, "world");
  World w;
  w.grid = detail::parse_grid(require(doc, "grid", ""));

  if (doc.contains("obstacles")) {
    const auto& arr = as_array(doc["obstacles"], "obstacles");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = item("obstacles", i);
      const auto& o = arr[i];
      ObstacleSpec spec;
      spec.id = as_string(require(o, "id", p), child(p, "id"));
      spec.label = o.contains("label") ? as_string(o["label"], child(p, "label")) : "unknown";
      if (o.contains("disc")) {
        const auto dp = child(p, "disc");
        spec.shape = Disc{as_vec2(require(o["disc"], "center", dp), child(dp, "center")),
                          as_number(require(o["disc"], "radius", dp), child(dp, "radius"))};
      } else if (o.contains("rect")) {
        spec.shape = detail::parse_rect(o["rect"], child(p, "rect"));
      } else {
        throw ParseError(p + ": needs a 'disc' or 'rect' shape");
      }
      w.obstacles.push_back(std::move(spec));
    }
  }

  if (doc.contains("dynamics")) {
    const auto& arr = as_array(doc["dynamics"], "dynamics");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = item("dynamics", i);
      const auto& d = arr[i];
      DynamicAgentSpec spec;
      spec.id = as_string(require(d, "id", p), child(p, "id"));
      spec.label = d.contains("label") ? as_string(d["label"], child(p, "label")) : "person";
      spec.radius = number_or(d, "radius", p, 0.3);
      const auto& path = as_array(require(d, "path", p), child(p, "path"));
      for (std::size_t k = 0; k < path.size(); ++k)
        spec.path.push_back(as_vec2(path[k], item(child(p, "path"), k)));
      spec.speed = as_number(require(d, "speed", p), child(p, "speed"));
      spec.start_time = number_or(d, "start", p, 0.0);
      spec.loop = bool_or(d, "loop", p, false);
      w.dynamics.push_back(std::move(spec));
    }
  }

  if (doc.contains("lights")) {
    const auto& arr = as_array(doc["lights"], "lights");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = item("lights", i);
      const auto& l = arr[i];
      TrafficLight light;
      light.id = as_string(require(l, "id", p), child(p, "id"));
      light.zebra = detail::parse_rect(require(l, "zebra", p), child(p, "zebra"));
      light.green = as_number(require(l, "green", p), child(p, "green"));
      light.red = number_or(l, "red", p, 30.0);
      light.offset = number_or(l, "offset", p, 0.0);
      if (l.contains("signal")) light.signal = as_vec2(l["signal"], child(p, "signal"));
      w.lights.push_back(std::move(light));
    }
  }

  const auto& start = require(doc, "start", "");
  w.start.position = as_vec2(require(start, "position", "start"), "start.position");
  w.start.heading = wrap_angle(number_or(start, "heading", "start", 0.0));
  w.goal = as_vec2(require(doc, "goal", ""), "goal");

  validate(w);
  return w;
}

inline World load_world(std::string_view text) {
  return world_from_json(jsonutil::parse_document(text, "world"));
}

inline World load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open world file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_world(ss.str());
}

/// Canonical document; the grid is always written as inline rows.
inline nlohmann::json world_to_json(const World& w) {
  using nlohmann::json;
  using jsonutil::to_json;
  json doc;
  doc["schema"] = kWorldSchema;
  json rows = json::array();
  for (int y = w.grid.height() - 1; y >= 0; --y) {
    std::string row(static_cast<std::size_t>(w.grid.width()), '.');
    for (int x = 0; x < w.grid.width(); ++x)
      row[static_cast<std::size_t>(x)] = class_to_char(w.grid.at({x, y}));
    rows.push_back(std::move(row));
  }
  doc["grid"] = {{"resolution", w.grid.resolution()},
                 {"origin", to_json(w.grid.origin())},
                 {"rows", std::move(rows)}};

  json obstacles = json::array();
  for (const auto& o : w.obstacles) {
    json e = {{"id", o.id}, {"label", o.label}};
    if (const auto* d = std::get_if<Disc>(&o.shape)) {
      e["disc"] = {{"center", to_json(d->center)}, {"radius", d->radius}};
    } else {
      const auto& r = std::get<Rect>(o.shape);
      e["rect"] = {{"min", to_json(r.min)}, {"max", to_json(r.max)}};
    }
    obstacles.push_back(std::move(e));
  }
  doc["obstacles"] = std::move(obstacles);

  json dynamics = json::array();
  for (const auto& d : w.dynamics) {
    json path = json::array();
    for (const auto& p : d.path) path.push_back(to_json(p));
    dynamics.push_back({{"id", d.id},
                        {"label", d.label},
                        {"radius", d.radius},
                        {"path", std::move(path)},
                        {"speed", d.speed},
                        {"start", d.start_time},
                        {"loop", d.loop}});
  }
  doc["dynamics"] = std::move(dynamics);

  json lights = json::array();
  for (const auto& l : w.lights) {
    json e = {{"id", l.id},
              {"zebra", {{"min", to_json(l.zebra.min)}, {"max", to_json(l.zebra.max)}}},
              {"green", l.green},
              {"red", l.red},
              {"offset", l.offset}};
    if (l.signal) e["signal"] = to_json(*l.signal);
    lights.push_back(std::move(e));
  }
  doc["lights"] = std::move(lights);
  doc["start"] = {{"position", to_json(w.start.position)}, {"heading", w.start.heading}};
  doc["goal"] = to_json(w.goal);
  return doc;
}

inline std::string serialize_world(const World& w) { return world_to_json(w).dump(1); }

}  // namespace openwalk

#endif  // OPENWALK_WORLD_IO_HPP
