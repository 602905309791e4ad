#ifndef OPENWALK_PLOT_HPP
#define OPENWALK_PLOT_HPP

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <string>
#include <vector>

#include "openwalk/agent.hpp"
#include "openwalk/error.hpp"
#include "openwalk/world.hpp"

namespace openwalk {

struct PlotSpec {
  int max_width = 1200;
  int max_height = 800;
  double margin = 10.0;  // px
};

/// World to canvas: uniform scale, y flipped.
struct PlotTransform {
  double scale = 1.0;
  Vec2 world_min;
  double world_height = 0.0;
  double margin = 0.0;

  double x(double wx) const { return margin + (wx - world_min.x) * scale; }
  double y(double wy) const { return margin + (world_min.y + world_height - wy) * scale; }
};

inline PlotTransform make_transform(const SemanticGrid& g, const PlotSpec& spec) {
  const double ww = g.width() * g.resolution();
  const double wh = g.height() * g.resolution();
  PlotTransform t;
  t.scale = std::min((spec.max_width - 2 * spec.margin) / ww, (spec.max_height - 2 * spec.margin) / wh);
  t.world_min = g.origin();
  t.world_height = wh;
  t.margin = spec.margin;
  return t;
}

inline const char* class_color(SemanticClass c) {
  switch (c) {
    case SemanticClass::BlindTrack: return "#f2c94c";
    case SemanticClass::Sidewalk: return "#d9d9d9";
    case SemanticClass::ZebraCrossing: return "#ffffff";
    case SemanticClass::Roadway: return "#6e6e6e";
    case SemanticClass::ObstacleFixed: return "#8b5a2b";
    case SemanticClass::OffMap: return "#2b2b2b";
  }
  return "#000000";
}

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string px(double v) { return fmt("%.2f", v); }

}  // namespace detail

inline std::string render_trajectory_svg(const World& w, const std::vector<EpisodeResult>& results,
                                         const PlotSpec& spec = {}) {
  if (results.empty()) throw ValidationError("plot: needs at least one result");
  using detail::px;
  const auto& g = w.grid;
  const PlotTransform T = make_transform(g, spec);
  const double cw = 2 * spec.margin + g.width() * g.resolution() * T.scale;
  const double ch = 2 * spec.margin + g.height() * g.resolution() * T.scale;
  const double cell = g.resolution() * T.scale;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(cw) + "\" height=\"" + px(ch) +
       "\" viewBox=\"0 0 " + px(cw) + " " + px(ch) + "\">\n";
  s += "<g class=\"map\" shape-rendering=\"crispEdges\">\n";
  for (int y = 0; y < g.height(); ++y) {
    int x = 0;
    while (x < g.width()) {
      const SemanticClass c = g.at({x, y});
      int run = 1;
      while (x + run < g.width() && g.at({x + run, y}) == c) ++run;
      const Vec2 lo = g.origin() + Vec2{x * g.resolution(), (y + 1) * g.resolution()};
      s += "<rect x=\"" + px(T.x(lo.x)) + "\" y=\"" + px(T.y(lo.y)) + "\" width=\"" +
           px(run * cell) + "\" height=\"" + px(cell) + "\" fill=\"" + class_color(c) + "\"/>\n";
      x += run;
    }
  }
  s += "</g>\n<g class=\"obstacles\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\">\n";
  for (const auto& o : w.obstacles) {
    if (const auto* d = std::get_if<Disc>(&o.shape)) {
      s += "<circle class=\"obstacle\" cx=\"" + px(T.x(d->center.x)) + "\" cy=\"" +
           px(T.y(d->center.y)) + "\" r=\"" + px(d->radius * T.scale) + "\"/>\n";
    } else {
      const auto& r = std::get<Rect>(o.shape);
      s += "<rect class=\"obstacle\" x=\"" + px(T.x(r.min.x)) + "\" y=\"" + px(T.y(r.max.y)) +
           "\" width=\"" + px((r.max.x - r.min.x) * T.scale) + "\" height=\"" +
           px((r.max.y - r.min.y) * T.scale) + "\"/>\n";
    }
  }
  s += "</g>\n<g class=\"trajectories\" fill=\"none\" stroke-width=\"1.5\">\n";
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd",
                                             "#17becf", "#e377c2", "#8c564b", "#bcbd22"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    s += "<polyline class=\"trajectory\" stroke=\"";
    s += kPalette[i % std::size(kPalette)];
    s += "\" points=\"";
    bool first = true;
    for (const auto& p : results[i].trajectory) {
      if (!first) s += ' ';
      first = false;
      s += px(T.x(p.pose.position.x)) + "," + px(T.y(p.pose.position.y));
    }
    s += "\"/>\n";
  }
  s += "</g>\n<g class=\"contacts\" fill=\"#e74c3c\">\n";
  for (const auto& r : results) {
    for (const auto& c : r.contacts) {
      // Marker at the agent position when the contact opened.
      auto it = std::lower_bound(r.trajectory.begin(), r.trajectory.end(), c.t,
                                 [](const TrajectorySample& a, double t) { return a.t < t; });
      if (it == r.trajectory.end()) it = std::prev(r.trajectory.end());
      s += "<circle class=\"contact\" cx=\"" + px(T.x(it->pose.position.x)) + "\" cy=\"" +
           px(T.y(it->pose.position.y)) + "\" r=\"3.00\"/>\n";
    }
  }
  s += "</g>\n";
  const double gx = T.x(w.goal.x), gy = T.y(w.goal.y);
  s += "<circle class=\"goal\" cx=\"" + px(gx) + "\" cy=\"" + px(gy) +
       "\" r=\"5.00\" fill=\"none\" stroke=\"#27ae60\" stroke-width=\"2\"/>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace openwalk

#endif  // OPENWALK_PLOT_HPP
