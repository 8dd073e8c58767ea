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

#include "occrisk/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace occrisk
{

namespace
{

constexpr double kTimeTolerance = 1e-6;
constexpr double kEgoStartTolerance = 0.5;

std::string fmt(double v)
{
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_timing(
  const std::vector<AgentState> & states, double dt, double horizon, const std::string & entity,
  bool allow_single, std::vector<Violation> & out)
{
  if (states.empty()) {
    out.push_back({entity, "log is empty"});
    return;
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(states[i].speed >= 0.0)) {
      out.push_back({entity, "negative speed at sample " + std::to_string(i)});
      break;
    }
  }
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (!(states[i].t > states[i - 1].t)) {
      out.push_back({entity, "timestamps not strictly increasing at sample " + std::to_string(i)});
      return;
    }
    if (std::abs(states[i].t - states[i - 1].t - dt) > kTimeTolerance) {
      out.push_back({entity, "non-uniform time step at sample " + std::to_string(i)});
      return;
    }
  }
  if (std::abs(states.front().t) > kTimeTolerance) {
    out.push_back({entity, "log does not start at t=0"});
  }
  if (allow_single && states.size() == 1) {
    return;
  }
  if (std::abs(states.back().t - horizon) > kTimeTolerance) {
    out.push_back({entity, "log does not end at the horizon (" + fmt(states.back().t) + ")"});
  }
}

void check_polyline(const Polyline & line, const std::string & entity, std::vector<Violation> & out)
{
  if (line.size() < 2) {
    out.push_back({entity, "polyline needs at least 2 points"});
    return;
  }
  const auto & pts = line.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i] == pts[i - 1]) {
      out.push_back({entity, "consecutive duplicate points at index " + std::to_string(i)});
      return;
    }
  }
}

}  // namespace

double footprint_radius(const Footprint & footprint)
{
  return std::sqrt(footprint.half_length * footprint.half_width);
}

const AgentState & AgentLog::state_near(double t, double dt) const
{
  const auto idx = static_cast<long>(std::lround(t / dt));
  const long last = static_cast<long>(states.size()) - 1;
  return states[static_cast<std::size_t>(std::clamp(idx, 0L, last))];
}

int Scenario::steps() const { return static_cast<int>(std::lround(horizon / dt)); }

const LaneSegment * Scenario::find_lane(const std::string & id) const
{
  const auto it =
    std::find_if(lanes.begin(), lanes.end(), [&](const LaneSegment & l) { return l.id == id; });
  return it == lanes.end() ? nullptr : &*it;
}

const AgentLog * Scenario::find_agent(const std::string & id) const
{
  const auto it =
    std::find_if(agents.begin(), agents.end(), [&](const AgentLog & a) { return a.id == id; });
  return it == agents.end() ? nullptr : &*it;
}

std::vector<Violation> validate(const Scenario & scenario)
{
  std::vector<Violation> out;
  if (!(scenario.dt > 0.0) || !(scenario.horizon > 0.0)) {
    out.push_back({"scenario", "dt and horizon must be positive"});
  } else {
    const double ratio = scenario.horizon / scenario.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6) {
      out.push_back({"scenario", "horizon is not a multiple of dt"});
    }
  }

  std::set<std::string> lane_ids;
  for (const auto & lane : scenario.lanes) {
    if (!lane_ids.insert(lane.id).second) {
      out.push_back({"lane " + lane.id, "duplicate lane id"});
    }
  }
  for (const auto & lane : scenario.lanes) {
    const std::string entity = "lane " + lane.id;
    check_polyline(lane.centerline, entity, out);
    if (!(lane.width > 0.0)) {
      out.push_back({entity, "width must be positive"});
    }
    for (const auto & ref : lane.successors) {
      if (!lane_ids.count(ref)) {
        out.push_back({entity, "unknown successor " + ref});
      }
    }
    for (const auto & ref : lane.predecessors) {
      if (!lane_ids.count(ref)) {
        out.push_back({entity, "unknown predecessor " + ref});
      }
    }
  }

  std::set<std::string> agent_ids;
  std::set<std::string> provenance_ids;
  for (const auto & p : scenario.phantoms) {
    provenance_ids.insert(p.agent);
  }
  for (const auto & agent : scenario.agents) {
    const std::string entity = "agent " + agent.id;
    if (!agent_ids.insert(agent.id).second) {
      out.push_back({entity, "duplicate agent id"});
    }
    if (!(agent.footprint.half_length > 0.0) || !(agent.footprint.half_width > 0.0)) {
      out.push_back({entity, "footprint must be positive"});
    }
    const bool phantom = agent.kind == AgentKind::phantom;
    check_timing(agent.states, scenario.dt, scenario.horizon, entity, phantom, out);
    if (phantom && !provenance_ids.count(agent.id)) {
      out.push_back({entity, "phantom agent without provenance"});
    }
  }
  for (const auto & p : scenario.phantoms) {
    if (!agent_ids.count(p.agent)) {
      out.push_back({"phantom " + p.agent, "provenance refers to a missing agent"});
    }
    if (!lane_ids.count(p.segment_lane)) {
      out.push_back({"phantom " + p.agent, "provenance refers to unknown lane " + p.segment_lane});
    }
  }

  const auto & ego = scenario.ego;
  check_polyline(ego.reference_path, "ego", out);
  if (ego.reference_path.size() >= 2) {
    const double gap = distance(ego.initial.position(), ego.reference_path.points().front());
    if (gap > kEgoStartTolerance) {
      out.push_back({"ego", "initial position is " + fmt(gap) + " m from the path start"});
    }
  }
  if (!(ego.initial.speed >= 0.0)) {
    out.push_back({"ego", "negative initial speed"});
  }
  if (!ego.log.empty()) {
    check_timing(ego.log, scenario.dt, scenario.horizon, "ego log", false, out);
  }

  for (std::size_t i = 0; i < scenario.occluders.size(); ++i) {
    if (!is_convex(scenario.occluders[i])) {
      out.push_back({"occluder " + std::to_string(i), "polygon must be convex with >= 3 vertices"});
    }
  }
  return out;
}

PathProjection project_to_path(const Vec2 & point, const Polyline & path)
{
  return path.project(point);
}

SdfSample road_sdf_with_gradient(const Vec2 & point, const std::vector<LaneSegment> & lanes)
{
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_foot;
  for (const auto & lane : lanes) {
    const auto & pts = lane.centerline.points();
    const double half = 0.5 * lane.width;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double t = closest_segment_parameter(point, pts[i], pts[i + 1]);
      const Vec2 foot = pts[i] + (pts[i + 1] - pts[i]) * t;
      const double d = distance(point, foot) - half;
      if (d <= 0.0) {
        return {};
      }
      if (d < best) {
        best = d;
        best_foot = foot;
      }
    }
  }
  if (!std::isfinite(best)) {
    return {};
  }
  const Vec2 away = point - best_foot;
  return {best, away / norm(away)};
}

double road_sdf(const Vec2 & point, const std::vector<LaneSegment> & lanes)
{
  return road_sdf_with_gradient(point, lanes).value;
}

std::vector<KinematicState> ego_log_states(const Scenario & scenario)
{
  std::vector<KinematicState> out;
  const auto & ego = scenario.ego;
  if (!ego.log.empty()) {
    out.reserve(ego.log.size());
    for (const auto & st : ego.log) {
      out.push_back(st.kinematic());
    }
    return out;
  }
  const int n = scenario.steps();
  const double s0 = ego.reference_path.project(ego.initial.position()).s;
  for (int i = 0; i <= n; ++i) {
    const double s = s0 + ego.initial.speed * scenario.dt * i;
    const Vec2 p = ego.reference_path.point_at(s);
    out.push_back({p.x, p.y, ego.reference_path.heading_at(s), ego.initial.speed});
  }
  return out;
}

const char * to_string(LaneKind kind)
{
  switch (kind) {
    case LaneKind::drive:
      return "drive";
    case LaneKind::turn:
      return "turn";
    case LaneKind::merge:
      return "merge";
  }
  return "drive";
}

const char * to_string(AgentKind kind)
{
  return kind == AgentKind::phantom ? "phantom" : "vehicle";
}

}  // namespace occrisk
