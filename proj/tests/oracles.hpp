// Reference implementations used by the tests. They are written from the
// operation contracts and share no code with the library beyond data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "openwalk/planner.hpp"
#include "openwalk/sensors.hpp"

namespace oracle {

using openwalk::Cell;
using openwalk::Costmap;
using openwalk::DepthImage;
using openwalk::Vec2;

inline constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

/// Destination cost times step length, in 1e-9 cost-meter units rounded up.
inline std::int64_t step_units(double dest_cost, int dx, int dy, double res) {
  const double len = (dx != 0 && dy != 0) ? std::sqrt(2.0) * res : res;
  return static_cast<std::int64_t>(std::ceil(dest_cost * len * 1e9));
}

/// Plain Dijkstra from `src` over non-blocked cells. With `reverse` the edge
/// u->v is charged at u's cost, giving distances *to* src.
inline std::vector<std::int64_t> dijkstra(const Costmap& m, Cell src, bool reverse = false) {
  const int w = m.width(), h = m.height();
  std::vector<std::int64_t> d(static_cast<std::size_t>(w) * h, kInf);
  auto id = [w](Cell c) { return static_cast<std::size_t>(c.y) * w + c.x; };
  if (m.blocked(src)) return d;
  using Item = std::pair<std::int64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[id(src)] = 0;
  pq.push({0, id(src)});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du != d[u]) continue;
    const Cell cu{static_cast<int>(u % w), static_cast<int>(u / w)};
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        const Cell cv{cu.x + dx, cu.y + dy};
        if (cv.x < 0 || cv.y < 0 || cv.x >= w || cv.y >= h || m.blocked(cv)) continue;
        const double c = reverse ? m.at(cu) : m.at(cv);
        const std::int64_t nd = du + step_units(c, dx, dy, m.resolution());
        if (nd < d[id(cv)]) {
          d[id(cv)] = nd;
          pq.push({nd, id(cv)});
        }
      }
  }
  return d;
}

inline std::optional<std::int64_t> shortest(const Costmap& m, Cell s, Cell t) {
  if (m.blocked(s) || m.blocked(t)) return std::nullopt;
  const auto d = dijkstra(m, s);
  const auto v = d[static_cast<std::size_t>(t.y) * m.width() + t.x];
  if (v == kInf) return std::nullopt;
  return v;
}

/// Random map: 20% Blocked, other cells drawn from the finite class costs.
inline Costmap random_costmap(std::mt19937_64& rng, int n = 50, double blocked = 0.2) {
  static constexpr double kCosts[] = {1.0, 1.2, 1.5, 50.0};
  Costmap m(n, n, 0.1, {0.0, 0.0}, 1.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) m.set({x, y}, u(rng) < blocked ? openwalk::kBlocked : kCosts[pick(rng)]);
  return m;
}

inline Cell random_free_cell(const Costmap& m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ux(0, m.width() - 1), uy(0, m.height() - 1);
  while (true) {
    const Cell c{ux(rng), uy(rng)};
    if (!m.blocked(c)) return c;
  }
}

/// Depth completion done the slow way: each pass scans every pixel against a
/// frozen copy of the previous pass.
inline std::optional<DepthImage> complete(const DepthImage& in) {
  const int w = in.width(), h = in.height();
  bool any = false;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) any = any || in.is_valid(c, r);
  if (!any) return std::nullopt;
  DepthImage cur = in;
  while (true) {
    const DepthImage prev = cur;
    bool changed = false;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (prev.is_valid(c, r)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || cc < 0 || rr >= h || cc >= w || !prev.is_valid(cc, rr)) continue;
            best = std::min(best, prev.at(cc, rr));
          }
        if (std::isfinite(best)) {
          cur.set(c, r, best);
          changed = true;
        }
      }
    if (!changed) return cur;
  }
}

/// Constant-speed walk along a polyline by accumulating segment lengths.
inline Vec2 walk(const std::vector<Vec2>& path, double s) {
  if (s <= 0) return path.front();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double len = std::hypot(path[i + 1].x - path[i].x, path[i + 1].y - path[i].y);
    if (s <= len) {
      const double f = len > 0 ? s / len : 0;
      return {path[i].x + f * (path[i + 1].x - path[i].x), path[i].y + f * (path[i + 1].y - path[i].y)};
    }
    s -= len;
  }
  return path.back();
}

/// Ping-pong loop: unfold the polyline into out-and-back.
inline Vec2 walk_loop(const std::vector<Vec2>& path, double s) {
  std::vector<Vec2> round = path;
  for (auto it = path.rbegin() + 1; it != path.rend(); ++it) round.push_back(*it);
  double total = 0;
  for (std::size_t i = 0; i + 1 < round.size(); ++i)
    total += std::hypot(round[i + 1].x - round[i].x, round[i + 1].y - round[i].y);
  if (total <= 0) return path.front();
  return walk(round, std::fmod(s, total));
}

/// Range along a ray to the vertical line x = wall_x, from the origin.
inline std::optional<double> ray_to_vertical_wall(Vec2 o, double angle, double wall_x) {
  const double dx = std::cos(angle);
  if (dx <= 0) return std::nullopt;
  return (wall_x - o.x) / dx;
}

/// Nearest point of a disc boundary inside a cone, by dense sampling.
inline std::optional<double> sampled_cone_distance(Vec2 o, double cone_center, double half,
                                                   Vec2 c, double r, int samples = 200000) {
  std::optional<double> best;
  for (int i = 0; i < samples; ++i) {
    const double a = 2 * M_PI * i / samples;
    const Vec2 p{c.x + r * std::cos(a), c.y + r * std::sin(a)};
    const double b = std::atan2(p.y - o.y, p.x - o.x);
    double rel = std::remainder(b - cone_center, 2 * M_PI);
    if (std::abs(rel) > half) continue;
    const double d = std::hypot(p.x - o.x, p.y - o.y);
    if (!best || d < *best) best = d;
  }
  return best;
}

}  // namespace oracle
