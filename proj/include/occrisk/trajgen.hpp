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

#ifndef OCCRISK__TRAJGEN_HPP_
#define OCCRISK__TRAJGEN_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "occrisk/geometry.hpp"
#include "occrisk/scene.hpp"

namespace occrisk
{

struct Control
{
  double accel{0.0};
  double yaw_rate{0.0};
};

struct ControlLimits
{
  double max_accel{6.0};
  double max_yaw_rate{1.0};
};

struct ControlSequence
{
  std::vector<Control> controls;
  double dt{0.1};

  bool within(const ControlLimits & limits) const;
  ControlSequence clamped(const ControlLimits & limits) const;
};

struct Trajectory
{
  std::string agent_id;
  int mode_id{0};
  double dt{0.1};
  std::vector<KinematicState> states;
};

/// Per-agent mode lists, keyed by agent id so iteration order never depends on how the set
/// was produced.
using TrajectorySet = std::map<std::string, std::vector<Trajectory>>;

/// Explicit Euler unicycle rollout on (accel, yaw rate) controls; speed is floored at zero.
/// Returns controls.size() + 1 states.
Trajectory rollout(const KinematicState & initial, const ControlSequence & controls);

/// A chain of lanes followed by an agent, flattened into one centerline.
struct LaneRoute
{
  std::vector<std::string> lane_ids;
  Polyline path;
  double width{3.5};
};

/// Lane whose corridor best matches the state (nearest centerline, heading-aligned preferred).
std::string locate_lane(const std::vector<LaneSegment> & lanes, const KinematicState & state);

/// Every successor chain from `start_lane` up to `depth` successors deep, in successor order.
std::vector<LaneRoute> enumerate_routes(
  const Scenario & scenario, const std::string & start_lane, int depth = 2);

struct PursuitParams
{
  double min_lookahead{5.0};
  double lookahead_time{1.0};
  /// Curvature gain on sin(alpha) / lookahead. Classic pure pursuit uses 2, which leaves the
  /// lateral error underdamped; 5 keeps the linearized loop overdamped.
  double steering_gain{5.0};
  double speed_gain{4.0};
  /// Straight extension appended to the route so pursuit never runs out of path.
  double route_extension{200.0};
};

/// Closed-loop lane following: pure-pursuit yaw rate toward a lookahead point on the route plus
/// proportional speed regulation. Throws OffRouteStart if the agent starts farther than two lane
/// widths from the route.
ControlSequence nominal_controls(
  const KinematicState & state, const LaneRoute & route, double target_speed, int steps,
  double dt, const ControlLimits & limits = {}, const PursuitParams & params = {});

struct MultimodalConfig
{
  int modes{6};
  int route_depth{2};
  ControlLimits limits;
  PursuitParams pursuit;
};

/// One mode per successor branch at the current speed, then speed perturbations
/// (0.7x, 1.3x of current speed) cycling over branches until `modes` trajectories exist.
std::vector<Trajectory> multimodal(
  const Scenario & scenario, const AgentLog & agent, const MultimodalConfig & cfg);

/// Agents whose speed at t = 0 is at least v_min (inclusive); phantoms always qualify.
std::set<std::string> filter_active(const Scenario & scenario, double v_min);

/// Multimodal set for every active agent.
TrajectorySet multimodal_set(
  const Scenario & scenario, const std::set<std::string> & active, const MultimodalConfig & cfg);

/// Trajectory of an agent's recorded log (mode 0).
Trajectory log_trajectory(const AgentLog & agent, double dt);

/// Constant-velocity extrapolation of the agent's first state over the scenario horizon.
Trajectory constant_velocity(const AgentLog & agent, double dt, int steps);

}  // namespace occrisk

#endif  // OCCRISK__TRAJGEN_HPP_
