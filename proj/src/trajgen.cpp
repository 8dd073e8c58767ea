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

#include "occrisk/trajgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "occrisk/errors.hpp"

namespace occrisk
{

namespace
{

KinematicState euler_step(const KinematicState & s, const Control & u, double dt)
{
  KinematicState n;
  n.x = s.x + s.speed * std::cos(s.heading) * dt;
  n.y = s.y + s.speed * std::sin(s.heading) * dt;
  n.heading = s.heading + u.yaw_rate * dt;
  n.speed = std::max(0.0, s.speed + u.accel * dt);
  return n;
}

}  // namespace

bool ControlSequence::within(const ControlLimits & limits) const
{
  return std::all_of(controls.begin(), controls.end(), [&](const Control & u) {
    return std::abs(u.accel) <= limits.max_accel && std::abs(u.yaw_rate) <= limits.max_yaw_rate;
  });
}

ControlSequence ControlSequence::clamped(const ControlLimits & limits) const
{
  ControlSequence out{controls, dt};
  for (auto & u : out.controls) {
    u.accel = std::clamp(u.accel, -limits.max_accel, limits.max_accel);
    u.yaw_rate = std::clamp(u.yaw_rate, -limits.max_yaw_rate, limits.max_yaw_rate);
  }
  return out;
}

Trajectory rollout(const KinematicState & initial, const ControlSequence & controls)
{
  Trajectory traj;
  traj.dt = controls.dt;
  traj.states.reserve(controls.controls.size() + 1);
  traj.states.push_back(initial);
  for (const auto & u : controls.controls) {
    traj.states.push_back(euler_step(traj.states.back(), u, controls.dt));
  }
  return traj;
}

std::string locate_lane(const std::vector<LaneSegment> & lanes, const KinematicState & state)
{
  std::string best;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto & lane : lanes) {
    const auto proj = lane.centerline.project(state.position());
    const double heading_error =
      std::abs(wrap_angle(state.heading - lane.centerline.heading_at(proj.s)));
    double score = proj.distance + 2.0 * heading_error;
    if (proj.s >= lane.centerline.length() - 1e-6) {
      score += 0.01;
    }
    if (score < best_score) {
      best_score = score;
      best = lane.id;
    }
  }
  return best;
}

std::vector<LaneRoute> enumerate_routes(
  const Scenario & scenario, const std::string & start_lane, int depth)
{
  std::vector<LaneRoute> routes;
  if (scenario.find_lane(start_lane) == nullptr) {
    return routes;
  }
  std::vector<std::string> chain{start_lane};
  std::function<void(int)> walk = [&](int remaining) {
    const LaneSegment * tail = scenario.find_lane(chain.back());
    std::vector<const LaneSegment *> next;
    if (remaining > 0) {
      for (const auto & id : tail->successors) {
        if (const auto * lane = scenario.find_lane(id)) {
          next.push_back(lane);
        }
      }
    }
    if (next.empty()) {
      LaneRoute route;
      route.lane_ids = chain;
      std::vector<Vec2> pts;
      route.width = std::numeric_limits<double>::infinity();
      for (const auto & id : chain) {
        const auto * lane = scenario.find_lane(id);
        route.width = std::min(route.width, lane->width);
        for (const auto & p : lane->centerline.points()) {
          if (pts.empty() || distance(pts.back(), p) > 1e-6) {
            pts.push_back(p);
          }
        }
      }
      route.path = Polyline(std::move(pts));
      routes.push_back(std::move(route));
      return;
    }
    for (const auto * lane : next) {
      chain.push_back(lane->id);
      walk(remaining - 1);
      chain.pop_back();
    }
  };
  walk(depth);
  return routes;
}

ControlSequence nominal_controls(
  const KinematicState & state, const LaneRoute & route, double target_speed, int steps,
  double dt, const ControlLimits & limits, const PursuitParams & params)
{
  const Polyline path = route.path.extended(params.route_extension);
  const auto start = path.project(state.position());
  if (start.distance > 2.0 * route.width) {
    throw OffRouteStart(
      "agent starts " + std::to_string(start.distance) + " m from its route");
  }
  ControlSequence out;
  out.dt = dt;
  out.controls.reserve(static_cast<std::size_t>(steps));
  KinematicState s = state;
  for (int i = 0; i < steps; ++i) {
    const auto proj = path.project(s.position());
    const double lookahead = std::max(params.min_lookahead, params.lookahead_time * s.speed);
    const Vec2 target = path.point_at(proj.s + lookahead);
    const Vec2 to_target = target - s.position();
    const double alpha = wrap_angle(std::atan2(to_target.y, to_target.x) - s.heading);
    const double curvature = params.steering_gain * std::sin(alpha) / lookahead;
    Control u;
    u.yaw_rate = std::clamp(s.speed * curvature, -limits.max_yaw_rate, limits.max_yaw_rate);
    u.accel =
      std::clamp(params.speed_gain * (target_speed - s.speed), -limits.max_accel, limits.max_accel);
    out.controls.push_back(u);
    s = euler_step(s, u, dt);
  }
  return out;
}

std::vector<Trajectory> multimodal(
  const Scenario & scenario, const AgentLog & agent, const MultimodalConfig & cfg)
{
  const int steps = scenario.steps();
  const KinematicState initial = agent.states.front().kinematic();
  std::string lane_id;
  if (agent.kind == AgentKind::phantom) {
    for (const auto & p : scenario.phantoms) {
      if (p.agent == agent.id) {
        lane_id = p.segment_lane;
      }
    }
  }
  if (lane_id.empty() && !scenario.lanes.empty()) {
    lane_id = locate_lane(scenario.lanes, initial);
  }
  const auto routes = enumerate_routes(scenario, lane_id, cfg.route_depth);

  static constexpr double kFactors[] = {1.0, 0.7, 1.3};
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(cfg.modes));
  for (int j = 0; j < cfg.modes; ++j) {
    Trajectory traj;
    bool built = false;
    if (!routes.empty()) {
      const auto nb = static_cast<int>(routes.size());
      const double factor = kFactors[(j / nb) % 3];
      try {
        const auto controls = nominal_controls(
          initial, routes[static_cast<std::size_t>(j % nb)], factor * initial.speed, steps,
          scenario.dt, cfg.limits, cfg.pursuit);
        traj = rollout(initial, controls);
        built = true;
      } catch (const OffRouteStart &) {
        built = false;
      }
    }
    if (!built) {
      traj = constant_velocity(agent, scenario.dt, steps);
    }
    traj.agent_id = agent.id;
    traj.mode_id = j;
    traj.dt = scenario.dt;
    out.push_back(std::move(traj));
  }
  return out;
}

std::set<std::string> filter_active(const Scenario & scenario, double v_min)
{
  std::set<std::string> out;
  for (const auto & agent : scenario.agents) {
    if (agent.kind == AgentKind::phantom) {
      out.insert(agent.id);
    } else if (!agent.states.empty() && agent.states.front().speed >= v_min) {
      out.insert(agent.id);
    }
  }
  return out;
}

TrajectorySet multimodal_set(
  const Scenario & scenario, const std::set<std::string> & active, const MultimodalConfig & cfg)
{
  TrajectorySet set;
  for (const auto & agent : scenario.agents) {
    if (active.count(agent.id) && !agent.states.empty()) {
      set[agent.id] = multimodal(scenario, agent, cfg);
    }
  }
  return set;
}

Trajectory log_trajectory(const AgentLog & agent, double dt)
{
  Trajectory traj;
  traj.agent_id = agent.id;
  traj.dt = dt;
  traj.states.reserve(agent.states.size());
  for (const auto & s : agent.states) {
    traj.states.push_back(s.kinematic());
  }
  return traj;
}

Trajectory constant_velocity(const AgentLog & agent, double dt, int steps)
{
  Trajectory traj;
  traj.agent_id = agent.id;
  traj.dt = dt;
  const KinematicState s0 = agent.states.front().kinematic();
  const Vec2 vel = s0.velocity();
  for (int i = 0; i <= steps; ++i) {
    const Vec2 p = s0.position() + vel * (dt * i);
    traj.states.push_back({p.x, p.y, s0.heading, s0.speed});
  }
  return traj;
}

}  // namespace occrisk
