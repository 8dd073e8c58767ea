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

#ifndef OCCRISK_TESTS__SUPPORT_HPP_
#define OCCRISK_TESTS__SUPPORT_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "occrisk/guided_gen.hpp"
#include "occrisk/planner.hpp"
#include "occrisk/rng.hpp"
#include "occrisk/scene.hpp"

namespace occrisk::testing
{

inline LaneSegment straight_lane(
  const std::string & id, Vec2 a, Vec2 b, double width = 3.5)
{
  LaneSegment lane;
  lane.id = id;
  lane.centerline = Polyline({a, b});
  lane.width = width;
  return lane;
}

inline AgentLog constant_agent(
  const std::string & id, KinematicState s, double dt, int steps,
  AgentKind kind = AgentKind::vehicle)
{
  AgentLog agent;
  agent.id = id;
  agent.kind = kind;
  for (int i = 0; i <= steps; ++i) {
    const double t = dt * i;
    const Vec2 p = s.position() + s.velocity() * t;
    agent.states.push_back({t, p.x, p.y, s.heading, s.speed});
  }
  return agent;
}

/// Ego driving east along y = 0 from x = 0 on a 100 m straight lane.
inline Scenario straight_scene(double ego_speed = 10.0, double horizon = 8.0, double dt = 0.1)
{
  Scenario sc;
  sc.dt = dt;
  sc.horizon = horizon;
  sc.lanes.push_back(straight_lane("ego_lane", {-20.0, 0.0}, {200.0, 0.0}));
  sc.ego.initial = {0.0, 0.0, 0.0, ego_speed};
  sc.ego.reference_path = Polyline({{0.0, 0.0}, {200.0, 0.0}});
  sc.ego.d_desired = 0.0;
  return sc;
}

/// True when p lies within `tol` of some lane corridor edge, where the road violation has a kink.
inline bool near_road_edge(const Vec2 & p, const std::vector<LaneSegment> & lanes, double tol)
{
  for (const auto & lane : lanes) {
    if (std::abs(lane.centerline.distance_to(p) - 0.5 * lane.width) < tol) {
      return true;
    }
  }
  return false;
}

/// Five-step speed-planning instance on a straight 100 m path (dt 0.5 s, a_max 2, v_cap 5) so
/// that 0.5 m/s speed grids are closed under the rate bound.
inline PlanProblem toy_problem(CounterRng & rng, PlannerKind kind)
{
  PlanProblem pb;
  pb.path = Polyline({{0.0, 0.0}, {100.0, 0.0}});
  pb.dt = 0.5;
  pb.steps = 5;
  pb.weights.v_cap = 5.0;
  pb.weights.a_max = 2.0;
  pb.v0 = 0.5 * static_cast<double>(rng.uniform_int(0, 10));
  pb.d_desired = rng.uniform(5.0, 25.0);

  PlanObstacle crossing;
  crossing.id = "crossing";
  crossing.radius = 3.1;
  const double cx = rng.uniform(4.0, 14.0);
  const double cy0 = rng.uniform(-12.0, -4.0);
  const double cvy = rng.uniform(0.0, 4.0);
  for (int i = 0; i <= pb.steps; ++i) {
    crossing.positions.push_back({cx, cy0 + cvy * pb.dt * i});
  }
  pb.obstacles.push_back(crossing);

  if (kind == PlannerKind::risk_aware) {
    const double c = rng.uniform(2.0, 15.0);
    const double amp = rng.uniform(0.2, 1.0);
    const double width = rng.uniform(1.0, 4.0);
    pb.risk = [c, amp, width](double s, double) {
      const double z = (s - c) / width;
      return amp * std::exp(-0.5 * z * z);
    };
  } else if (kind == PlannerKind::srq) {
    const double conflict = rng.uniform(8.0, 20.0);
    pb.speed_limit = srq_speed_limit({conflict}, SrqParams{}, pb.weights.v_cap);
  } else if (kind == PlannerKind::opbp) {
    PlanObstacle phantom;
    phantom.id = "phantom";
    phantom.radius = 3.1;
    const double px = rng.uniform(6.0, 16.0);
    const double py0 = rng.uniform(4.0, 12.0);
    const double pvy = -rng.uniform(0.0, 4.0);
    for (int i = 0; i <= pb.steps; ++i) {
      phantom.positions.push_back({px, py0 + pvy * pb.dt * i});
    }
    pb.obstacles.push_back(phantom);
  }
  if (kind != PlannerKind::risk_aware) {
    pb.weights.w3 = 0.0;
  }
  return pb;
}

/// Exhaustive minimum over feasible profiles with speeds on a 0.5 m/s grid.
inline double grid_search_optimum(const PlanProblem & pb)
{
  const int levels = static_cast<int>(std::lround(pb.weights.v_cap / 0.5)) + 1;
  const int free = pb.steps - 1;
  std::vector<int> idx(static_cast<std::size_t>(free), 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<double> v{pb.v0};
    for (const int k : idx) {
      v.push_back(0.5 * k);
    }
    const auto prof = VelocityProfile::from_speeds(v, pb.dt);
    if (feasible(prof, pb, 1e-9)) {
      best = std::min(best, cost(prof, pb).total);
    }
    int pos = 0;
    while (pos < free && ++idx[static_cast<std::size_t>(pos)] == levels) {
      idx[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == free) {
      break;
    }
  }
  return best;
}


/// Ego eastbound along y = 0, phantom lane northbound along x = 30. The guidance scene points
/// into the fixture's own lanes, so fixtures are not copyable.
struct CrossingFixture
{
  Scenario scenario;
  AgentLog phantom;
  GuidanceScene scene;
  PhantomPrior prior;

  explicit CrossingFixture(double phantom_speed = 8.0, double phantom_y = -45.0)
  {
    scenario = straight_scene(10.0);
    scenario.lanes.push_back(straight_lane("cross", {30.0, -80.0}, {30.0, 80.0}));
    phantom = constant_agent(
      "phantom_cross_0", {30.0, phantom_y, std::numbers::pi / 2.0, phantom_speed}, scenario.dt, 0,
      AgentKind::phantom);
    scenario.agents.push_back(phantom);
    scenario.phantoms.push_back({phantom.id, "cross", phantom_y + 80.0, 1});
    std::vector<std::vector<Vec2>> others{positions(ego_log_states(scenario))};
    prior = make_phantom_prior(scenario, phantom, others, MultimodalConfig{});
    scene.others = others;
    scene.lanes = &scenario.lanes;
    scene.dt = scenario.dt;
    scene.initial = prior.initial;
  }
  CrossingFixture(const CrossingFixture &) = delete;
  CrossingFixture & operator=(const CrossingFixture &) = delete;
};

inline ControlVector random_controls(CounterRng & rng, std::size_t steps)
{
  ControlVector u;
  for (std::size_t i = 0; i < steps; ++i) {
    u.push_back(rng.uniform(-1.0, 1.0));
    u.push_back(rng.uniform(-0.3, 0.3));
  }
  return u;
}

}  // namespace occrisk::testing

#endif  // OCCRISK_TESTS__SUPPORT_HPP_
