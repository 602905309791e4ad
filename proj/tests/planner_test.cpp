#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "openwalk/planner.hpp"
#include "oracles.hpp"

using namespace openwalk;

namespace {

World plane(SemanticClass fill = SemanticClass::Sidewalk) {
  World w;
  w.grid = SemanticGrid(300, 300, 0.1, {-15.0, -15.0}, fill);
  w.start = {{0, 0}, 0};
  w.goal = {1, 0};
  return w;
}

SemanticObservation observe(const World& w, Vec2 at) {
  PerceptionConfig cfg;
  cfg.mislabel_rate = 0.0;
  Rng rng(1);
  return observe_semantics(w, {at, 0.0}, cfg, rng);
}

ObstacleEstimate ahead(double dist, double bearing = 0.0) {
  return {bearing, dist, DetectClass::Person, kSourceVision, 0.0};
}

Costmap uniform(int n, double cost) { return Costmap(n, n, 0.1, {0.0, 0.0}, cost, 1.0); }

PlanPath straight_plan(Vec2 from, double heading, double len = 3.0) {
  PlanPath p;
  for (double s = 0.0; s <= len + 1e-9; s += 0.1) p.waypoints.push_back(from + unit_vector(heading) * s);
  return p;
}

}  // namespace

// --- costmap --------------------------------------------------------------------

TEST(Costmap, ClassTable) {
  const PlannerConfig cfg;
  EXPECT_EQ(cfg.cost_of(SemanticClass::BlindTrack), 1.0);
  EXPECT_EQ(cfg.cost_of(SemanticClass::Sidewalk), 1.2);
  EXPECT_EQ(cfg.cost_of(SemanticClass::ZebraCrossing), 1.5);
  EXPECT_EQ(cfg.cost_of(SemanticClass::Roadway), 50.0);
  EXPECT_TRUE(is_blocked(cfg.cost_of(SemanticClass::ObstacleFixed)));
  EXPECT_TRUE(is_blocked(cfg.cost_of(SemanticClass::OffMap)));
  EXPECT_EQ(cfg.min_class_cost(), 1.0);
}

TEST(Costmap, AllSidewalkIsUniform) {
  const World w = plane();
  const auto obs = observe(w, {0, 0});
  const auto map = build_costmap(obs, {{0, 0}, 0}, {}, {}, PlannerConfig{});
  EXPECT_EQ(map.width(), 101);
  for (double c : map.costs()) EXPECT_EQ(c, 1.2);
}

TEST(Costmap, EstimateBlocksDiscAndInflatesRing) {
  const World w = plane();
  const auto obs = observe(w, {0, 0});
  const PlannerConfig cfg;
  const auto map = build_costmap(obs, {{0, 0}, 0}, {ahead(2.0)}, {}, cfg);
  const Vec2 centre{2.0, 0.0};
  std::vector<Vec2> blocked;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const Vec2 p = map.center_of({x, y});
      const bool inside = distance(p, centre) <= 0.3 + 1e-12;
      EXPECT_EQ(map.blocked({x, y}), inside) << x << "," << y;
      if (inside) blocked.push_back(p);
    }
  ASSERT_FALSE(blocked.empty());
  int ring = 0;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (map.blocked({x, y})) continue;
      const Vec2 p = map.center_of({x, y});
      double nearest = 1e9;
      for (const auto& b : blocked) nearest = std::min(nearest, distance(p, b));
      const double want = nearest <= 0.4 + 1e-9 ? 10.0 : 1.2;
      EXPECT_EQ(map.at({x, y}), want) << x << "," << y;
      ring += want == 10.0;
    }
  EXPECT_GT(ring, 0);
}

TEST(Costmap, ZebraGatedByLight) {
  World w = plane();
  const Rect zebra{{1.0, -1.5}, {4.0, 1.5}};
  w.grid.paint(zebra, SemanticClass::ZebraCrossing);
  const auto obs = observe(w, {0, 0});
  PlannerConfig cfg;
  const auto red = build_costmap(obs, {{0, 0}, 0}, {}, {{zebra, LightPhase::Red}}, cfg);
  const auto green = build_costmap(obs, {{0, 0}, 0}, {}, {{zebra, LightPhase::Green}}, cfg);
  int zebra_cells = 0;
  for (int y = 0; y < red.height(); ++y)
    for (int x = 0; x < red.width(); ++x) {
      if (obs.at({x, y}) != SemanticClass::ZebraCrossing) continue;
      ++zebra_cells;
      EXPECT_TRUE(red.blocked({x, y}));
      EXPECT_EQ(green.at({x, y}), 1.5);
    }
  EXPECT_GT(zebra_cells, 0);
}

TEST(Costmap, AddingEstimateNeverLowersCost) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> b(-1.0, 1.0), d(0.5, 4.5), hw(0.0, 0.15);
  World w = plane();
  w.grid.paint({{2, -5}, {3, 5}}, SemanticClass::Roadway);
  w.grid.paint({{-1, 1}, {4, 1.6}}, SemanticClass::BlindTrack);
  const auto obs = observe(w, {0, 0});
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ObstacleEstimate> est;
    for (int k = 0; k < 2; ++k) {
      auto e = ahead(d(gen), b(gen));
      e.half_width = hw(gen);
      est.push_back(e);
    }
    const auto before = build_costmap(obs, {{0, 0}, 0.2}, est, {}, PlannerConfig{});
    est.push_back(ahead(d(gen), b(gen)));
    const auto after = build_costmap(obs, {{0, 0}, 0.2}, est, {}, PlannerConfig{});
    for (std::size_t i = 0; i < before.costs().size(); ++i) ASSERT_GE(after.costs()[i], before.costs()[i]);
  }
}

// --- A* -------------------------------------------------------------------------

TEST(AStar, StartIsGoal) {
  const auto p = astar(uniform(10, 1.2), {3, 3}, {3, 3});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->cells.size(), 1u);
  EXPECT_EQ(p->total_cost(), 0.0);
}

TEST(AStar, UniformDiagonal) {
  const Costmap m = uniform(10, 1.2);
  const auto p = astar(m, {0, 0}, {9, 9});
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->total_cost(), 9 * std::sqrt(2.0) * 0.1 * 1.2, 1e-8);
  EXPECT_NEAR(p->total_cost(), 1.5274, 1e-4);
  EXPECT_EQ(p->cost_units, *oracle::shortest(m, {0, 0}, {9, 9}));
  EXPECT_EQ(p->cells.size(), 10u);
}

TEST(AStar, WallGivesNoPath) {
  Costmap m = uniform(10, 1.0);
  for (int y = 0; y < 10; ++y) m.set({5, y}, kBlocked);
  EXPECT_FALSE(astar(m, {0, 0}, {9, 9}));
  EXPECT_FALSE(astar(m, {0, 0}, {5, 5}));
}

TEST(AStar, PathIsConnectedAndPriced) {
  std::mt19937_64 gen(5);
  const Costmap m = oracle::random_costmap(gen);
  for (int i = 0; i < 20; ++i) {
    const Cell s = oracle::random_free_cell(m, gen), t = oracle::random_free_cell(m, gen);
    const auto p = astar(m, s, t);
    if (!p) continue;
    ASSERT_EQ(p->cells.front(), s);
    ASSERT_EQ(p->cells.back(), t);
    std::int64_t sum = 0;
    for (std::size_t k = 1; k < p->cells.size(); ++k) {
      const int dx = p->cells[k].x - p->cells[k - 1].x, dy = p->cells[k].y - p->cells[k - 1].y;
      ASSERT_LE(std::abs(dx), 1);
      ASSERT_LE(std::abs(dy), 1);
      ASSERT_FALSE(m.blocked(p->cells[k]));
      sum += oracle::step_units(m.at(p->cells[k]), dx, dy, 0.1);
    }
    EXPECT_EQ(sum, p->cost_units);
  }
}

TEST(AStar, MatchesDijkstraOnRandomMaps) {
  std::mt19937_64 gen(2024);
  int reachable = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Costmap m = oracle::random_costmap(gen);
    const Cell s = oracle::random_free_cell(m, gen), t = oracle::random_free_cell(m, gen);
    const auto want = oracle::shortest(m, s, t);
    const auto got = astar(m, s, t);
    ASSERT_EQ(got.has_value(), want.has_value()) << trial;
    if (!got) continue;
    ++reachable;
    ASSERT_EQ(got->cost_units, *want) << trial;
  }
  EXPECT_GE(reachable, 100);
}

TEST(AStar, HeuristicAdmissibleOnExpandedNodes) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Costmap m = oracle::random_costmap(gen);
    const Cell s = oracle::random_free_cell(m, gen), t = oracle::random_free_cell(m, gen);
    AStarTrace trace;
    astar(m, s, t, &trace);
    const auto to_goal = oracle::dijkstra(m, t, true);
    for (const Cell& c : trace.expanded) {
      const auto d = to_goal[static_cast<std::size_t>(c.y) * m.width() + c.x];
      if (d == oracle::kInf) continue;
      ASSERT_LE(heuristic_units(m, c, t), d);
    }
  }
}

TEST(AStar, ScalingKeepsOptimality) {
  std::mt19937_64 gen(7);
  for (double lambda : {0.5, 2.0, 3.7}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Costmap m = oracle::random_costmap(gen);
      Costmap scaled(m.width(), m.height(), m.resolution(), m.origin(), 1.0, m.min_cost() * lambda);
      for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
          scaled.set({x, y}, m.blocked({x, y}) ? kBlocked : m.at({x, y}) * lambda);
      const Cell s = oracle::random_free_cell(m, gen), t = oracle::random_free_cell(m, gen);
      const auto p = astar(scaled, s, t);
      const auto want = oracle::shortest(scaled, s, t);
      ASSERT_EQ(p.has_value(), want.has_value());
      if (!p) continue;
      EXPECT_EQ(p->cost_units, *want);
      // The same cells are also optimal on the unscaled map, up to per-step rounding.
      const auto base = oracle::shortest(m, s, t);
      std::int64_t on_base = 0;
      for (std::size_t k = 1; k < p->cells.size(); ++k)
        on_base += oracle::step_units(m.at(p->cells[k]), p->cells[k].x - p->cells[k - 1].x,
                                      p->cells[k].y - p->cells[k - 1].y, 0.1);
      EXPECT_LE(std::abs(on_base - *base), static_cast<std::int64_t>(p->cells.size()) * 4);
    }
  }
}

TEST(AStar, Deterministic) {
  std::mt19937_64 gen(3);
  const Costmap m = oracle::random_costmap(gen, 50, 0.1);
  const auto a = astar(m, {0, 0}, {49, 49});
  const auto b = astar(m, {0, 0}, {49, 49});
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->cells, b->cells);
}

// --- local goal ------------------------------------------------------------------

TEST(LocalGoal, WaypointInsideWindow) {
  const Costmap m(101, 101, 0.1, {-5.05, -5.05}, 1.2, 1.0);
  RouteSpec r{{{2.0, 1.0}}, 0};
  EXPECT_EQ(*select_local_goal(r, {0, 0}, m, 0.5), m.cell_of({2.0, 1.0}));
}

TEST(LocalGoal, FarEastPicksEastEdge) {
  const Costmap m(101, 101, 0.1, {-5.05, -5.05}, 1.2, 1.0);
  RouteSpec r{{{20.0, 0.0}}, 0};
  EXPECT_EQ(*select_local_goal(r, {0, 0}, m, 0.5), (Cell{100, 50}));
}

TEST(LocalGoal, AdvancesPastReachedWaypoints) {
  const Costmap m(101, 101, 0.1, {-5.05, -5.05}, 1.2, 1.0);
  RouteSpec r{{{0.2, 0.0}, {0.0, 0.3}, {3.0, 3.0}}, 0};
  EXPECT_EQ(*select_local_goal(r, {0, 0}, m, 0.5), m.cell_of({3.0, 3.0}));
  EXPECT_EQ(r.current, 2u);
}

TEST(LocalGoal, BlockedBoundaryMatchesBruteForce) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> far(-30.0, 30.0), u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Costmap m(31, 31, 0.1, {-1.55, -1.55}, 1.2, 1.0);
    for (int y = 0; y < 31; ++y)
      for (int x = 0; x < 31; ++x)
        if (u(gen) < 0.5) m.set({x, y}, kBlocked);
    Vec2 target{far(gen), far(gen)};
    if (m.in_bounds(m.cell_of(target))) continue;
    RouteSpec r{{target}, 0};
    const auto got = select_local_goal(r, {0, 0}, m, 0.5);
    std::optional<double> best;
    for (int y = 0; y < 31; ++y)
      for (int x = 0; x < 31; ++x) {
        if (!(x == 0 || y == 0 || x == 30 || y == 30) || m.blocked({x, y})) continue;
        const double d = distance(m.center_of({x, y}), target);
        if (!best || d < *best) best = d;
      }
    ASSERT_EQ(got.has_value(), best.has_value());
    if (got) {
      EXPECT_FALSE(m.blocked(*got));
      EXPECT_EQ(distance(m.center_of(*got), target), *best);
    }
  }
}

// --- instructions ------------------------------------------------------------------

TEST(Instruction, Steering) {
  const PlannerConfig cfg;
  const Vec2 goal{50, 50};
  EXPECT_EQ(make_instruction(straight_plan({0, 0}, 0.0), {{0, 0}, 0.0}, {}, false, goal, cfg),
            Instruction::GoStraight);
  EXPECT_EQ(make_instruction(straight_plan({0, 0}, kPi / 2), {{0, 0}, 0.0}, {}, false, goal, cfg),
            Instruction::TurnLeft);
  EXPECT_EQ(make_instruction(straight_plan({0, 0}, -kPi / 2), {{0, 0}, 0.0}, {}, false, goal, cfg),
            Instruction::TurnRight);
  EXPECT_EQ(make_instruction(straight_plan({0, 0}, deg_to_rad(14)), {{0, 0}, 0.0}, {}, false, goal, cfg),
            Instruction::GoStraight);
  EXPECT_EQ(make_instruction(straight_plan({0, 0}, deg_to_rad(16)), {{0, 0}, 0.0}, {}, false, goal, cfg),
            Instruction::TurnLeft);
}

TEST(Instruction, StopForCloseObstacleAhead) {
  const PlannerConfig cfg;
  const auto plan = straight_plan({0, 0}, 0.0);
  EXPECT_EQ(make_instruction(plan, {{0, 0}, 0.0}, {ahead(0.8)}, false, {50, 0}, cfg), Instruction::Stop);
  EXPECT_EQ(make_instruction(plan, {{0, 0}, 0.0}, {ahead(1.2)}, false, {50, 0}, cfg),
            Instruction::GoStraight);
  EXPECT_EQ(make_instruction(plan, {{0, 0}, 0.0}, {ahead(0.5, kPi / 2)}, false, {50, 0}, cfg),
            Instruction::GoStraight);
}

TEST(Instruction, NoPathIsStop) {
  EXPECT_EQ(make_instruction(std::nullopt, {{0, 0}, 0.0}, {}, false, {50, 0}, PlannerConfig{}),
            Instruction::Stop);
}

TEST(Instruction, PriorityOrder) {
  const PlannerConfig cfg;
  const auto plan = straight_plan({0, 0}, 0.0);
  EXPECT_EQ(make_instruction(plan, {{0, 0}, 0.0}, {ahead(0.5)}, true, {0.3, 0}, cfg), Instruction::Arrived);
  EXPECT_EQ(make_instruction(plan, {{0, 0}, 0.0}, {ahead(0.5)}, true, {50, 0}, cfg), Instruction::Wait);
  EXPECT_EQ(make_instruction(std::nullopt, {{0, 0}, 0.0}, {}, true, {50, 0}, cfg), Instruction::Wait);
}

TEST(Instruction, CurbWithRedLightWaits) {
  // Agent at the curb of a red zebra: the zebra is blocked, so the plan runs
  // out; the wait flag takes precedence over that fail-safe Stop.
  World w = plane();
  const Rect zebra{{0.5, -1.5}, {4.0, 1.5}};
  w.grid.paint(zebra, SemanticClass::ZebraCrossing);
  const auto obs = observe(w, {0, 0});
  const auto map = build_costmap(obs, {{0, 0}, 0}, {}, {{zebra, LightPhase::Red}}, PlannerConfig{});
  RouteSpec r{{{6.0, 0.0}}, 0};
  const auto goal = select_local_goal(r, {0, 0}, map, 0.5);
  const auto plan = goal ? astar(map, map.cell_of({0, 0}), *goal) : std::nullopt;
  EXPECT_EQ(make_instruction(plan, {{0, 0}, 0.0}, {}, true, {6, 0}, PlannerConfig{}), Instruction::Wait);
}

TEST(Instruction, TotalAndDeterministic) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> a(-kPi, kPi), d(0.0, 3.0), u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::optional<PlanPath> plan =
        u(gen) < 0.2 ? std::nullopt : std::optional<PlanPath>(straight_plan({0, 0}, a(gen), d(gen)));
    std::vector<ObstacleEstimate> est;
    if (u(gen) < 0.5) est.push_back(ahead(d(gen), a(gen)));
    const Pose pose{{0, 0}, a(gen)};
    const bool wait = u(gen) < 0.2;
    const Vec2 goal{d(gen), d(gen)};
    const auto i1 = make_instruction(plan, pose, est, wait, goal, PlannerConfig{});
    const auto i2 = make_instruction(plan, pose, est, wait, goal, PlannerConfig{});
    EXPECT_EQ(i1, i2);
    EXPECT_TRUE(instruction_from_name(instruction_name(i1)).has_value());
  }
}
