// Copyright 2026 The occrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "occrisk/demo.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "occrisk/rng.hpp"

namespace occrisk
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kLaneWidth = 3.5;
constexpr double kRoadEnd = 170.0;
/// Beyond what the ego can cover in the horizon, so the blind drive keeps going.
constexpr double kTargetDistance = 120.0;

LaneSegment lane(std::string id, std::vector<Vec2> points, std::vector<std::string> next = {})
{
  LaneSegment out;
  out.id = std::move(id);
  out.centerline = Polyline(std::move(points));
  out.width = kLaneWidth;
  out.successors = std::move(next);
  return out;
}

/// Points on a circular arc from angle a0 to a1 (exclusive of the start point).
void append_arc(std::vector<Vec2> & pts, const Vec2 & c, double r, double a0, double a1, int n)
{
  for (int i = 1; i <= n; ++i) {
    const double a = a0 + (a1 - a0) * i / n;
    pts.push_back(c + unit_from_angle(a) * r);
  }
}

Polygon box(double x0, double y0, double x1, double y1)
{
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

AgentLog constant_log(
  const std::string & id, const KinematicState & s, double dt, int steps, Footprint fp = {})
{
  AgentLog agent;
  agent.id = id;
  agent.footprint = fp;
  for (int i = 0; i <= steps; ++i) {
    const double t = dt * i;
    const Vec2 p = s.position() + s.velocity() * t;
    agent.states.push_back({t, p.x, p.y, s.heading, s.speed});
  }
  return agent;
}

void link_predecessors(Scenario & sc)
{
  for (auto & l : sc.lanes) {
    l.predecessors.clear();
  }
  for (const auto & l : sc.lanes) {
    for (const auto & next : l.successors) {
      for (auto & m : sc.lanes) {
        if (m.id == next) {
          m.predecessors.push_back(l.id);
        }
      }
    }
  }
}

}  // namespace

const char * to_string(DemoArchetype archetype)
{
  switch (archetype) {
    case DemoArchetype::t_junction:
      return "t_junction";
    case DemoArchetype::wall_crossing:
      return "wall_crossing";
    case DemoArchetype::parked_bus:
      return "parked_bus";
  }
  return "unknown";
}

Scenario make_demo_scenario(
  DemoArchetype archetype, std::uint64_t seed, const PlannerWeights & weights)
{
  CounterRng rng = CounterRng(seed).substream(static_cast<std::uint64_t>(archetype));
  Scenario sc;
  sc.dt = 0.1;
  sc.horizon = 8.0;
  const int steps = sc.steps();

  // Beyond ~72 m the hidden approach leaves the 80 m sensor range before the wall shadow
  // covers a vehicle length of it.
  const double x_junction = rng.uniform(50.0, 72.0);
  const double ego_speed = rng.uniform(8.0, 12.0);
  const double wall_gap = rng.uniform(4.5, 7.0);
  const double wall_depth = rng.uniform(20.0, 35.0);

  sc.lanes.push_back(lane("main_e", {{-30.0, 0.0}, {kRoadEnd, 0.0}}));
  sc.lanes.push_back(lane("main_w", {{kRoadEnd, kLaneWidth}, {-30.0, kLaneWidth}}));

  const double xj = x_junction;
  switch (archetype) {
    case DemoArchetype::t_junction: {
      const double y_stop = -6.0;
      sc.lanes.push_back(lane("side", {{xj, -60.0}, {xj, y_stop}}, {"side_r", "side_l"}));
      std::vector<Vec2> right{{xj, y_stop}};
      append_arc(right, {xj + 6.0, y_stop}, 6.0, kPi, kPi / 2.0, 6);
      right.push_back({kRoadEnd, 0.0});
      sc.lanes.push_back(lane("side_r", right));
      const double r_left = -y_stop + kLaneWidth;
      std::vector<Vec2> left{{xj, y_stop}};
      append_arc(left, {xj - r_left, y_stop}, r_left, 0.0, kPi / 2.0, 8);
      left.push_back({-30.0, kLaneWidth});
      sc.lanes.push_back(lane("side_l", left));
      sc.occluders.push_back(box(xj - wall_gap - wall_depth, -40.0, xj - wall_gap, -4.5));
      break;
    }
    case DemoArchetype::wall_crossing: {
      const double h = 0.5 * kLaneWidth;
      sc.lanes.push_back(lane("cross_nb", {{xj + h, -60.0}, {xj + h, 70.0}}));
      sc.lanes.push_back(lane("cross_sb", {{xj - h, 70.0}, {xj - h, -60.0}}));
      sc.occluders.push_back(box(xj - wall_gap - wall_depth, -40.0, xj - wall_gap, -4.5));
      sc.occluders.push_back(
        box(xj - wall_gap - wall_depth, 8.0, xj - wall_gap, 8.0 + rng.uniform(20.0, 40.0)));
      break;
    }
    case DemoArchetype::parked_bus: {
      sc.lanes.push_back(lane("cross_nb", {{xj, -60.0}, {xj, 70.0}}));
      const double bus_x = xj - wall_gap;
      const Footprint bus{7.0, 1.3};
      sc.agents.push_back(
        constant_log("bus", {bus_x, -6.0 - bus.half_length, kPi / 2.0, 0.0}, sc.dt, steps, bus));
      break;
    }
  }

  const double traffic_x = rng.uniform(80.0, 140.0);
  const double traffic_speed = rng.uniform(6.0, 12.0);
  sc.agents.push_back(
    constant_log("traffic_w", {traffic_x, kLaneWidth, kPi, traffic_speed}, sc.dt, steps));
  link_predecessors(sc);

  sc.ego.initial = {0.0, 0.0, 0.0, ego_speed};
  sc.ego.reference_path = Polyline({{0.0, 0.0}, {kRoadEnd, 0.0}});
  sc.ego.d_desired = kTargetDistance;
  const auto pb = make_problem(sc, weights);
  const auto blind = plan_noap(sc, weights);
  const auto states = profile_states(blind.profile, pb.path, pb.path_offset);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto & s = states[i];
    sc.ego.log.push_back({sc.dt * static_cast<double>(i), s.x, s.y, s.heading, s.speed});
  }
  sc.metadata["archetype"] = to_string(archetype);
  sc.metadata["demo_seed"] = std::to_string(seed);
  return sc;
}

std::vector<DemoScenario> make_demo_suite(
  std::uint64_t seed, int count, const PlannerWeights & weights)
{
  std::vector<DemoScenario> out;
  const CounterRng root(seed);
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "demo_%03d", i);
    const auto archetype = static_cast<DemoArchetype>(i % 3);
    const std::uint64_t scenario_seed = root.substream(static_cast<std::uint64_t>(i)).key();
    out.push_back({id, make_demo_scenario(archetype, scenario_seed, weights)});
  }
  return out;
}

}  // namespace occrisk
