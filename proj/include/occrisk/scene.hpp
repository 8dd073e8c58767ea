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

#ifndef OCCRISK__SCENE_HPP_
#define OCCRISK__SCENE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occrisk/geometry.hpp"

namespace occrisk
{

enum class LaneKind { drive, turn, merge };
enum class AgentKind { vehicle, phantom };

struct LaneSegment
{
  std::string id;
  Polyline centerline;
  double width{3.5};
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;
  LaneKind kind{LaneKind::drive};
};

struct Footprint
{
  double half_length{2.4};
  double half_width{1.0};
};

/// Disc radius used for center-distance collision geometry. The geometric mean of the half
/// extents keeps side-by-side vehicles in adjacent 3.5 m lanes apart.
double footprint_radius(const Footprint & footprint);

struct KinematicState
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double speed{0.0};

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return unit_from_angle(heading) * speed; }
};

struct AgentState
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double speed{0.0};

  Vec2 position() const { return {x, y}; }
  KinematicState kinematic() const { return {x, y, heading, speed}; }
};

struct AgentLog
{
  std::string id;
  AgentKind kind{AgentKind::vehicle};
  Footprint footprint;
  std::vector<AgentState> states;

  /// State at the log sample nearest to t (clamped to the log span).
  const AgentState & state_near(double t, double dt) const;
};

struct PhantomProvenance
{
  std::string agent;
  std::string segment_lane;
  double s{0.0};
  std::uint64_t seed{0};
};

struct EgoSpec
{
  KinematicState initial;
  Polyline reference_path;
  double d_desired{0.0};
  Footprint footprint;
  /// Recorded ego motion over the horizon; may be empty.
  std::vector<AgentState> log;
};

struct Scenario
{
  std::vector<LaneSegment> lanes;
  std::vector<AgentLog> agents;
  EgoSpec ego;
  std::vector<Polygon> occluders;
  double dt{0.1};
  double horizon{8.0};
  std::map<std::string, std::string> metadata;
  std::vector<PhantomProvenance> phantoms;

  int steps() const;
  const LaneSegment * find_lane(const std::string & id) const;
  const AgentLog * find_agent(const std::string & id) const;
};

struct Violation
{
  std::string entity;
  std::string rule;
};

/// Checks every type invariant; never throws.
std::vector<Violation> validate(const Scenario & scenario);

/// Arc length and signed lateral offset (+ left) of the nearest point on the path.
PathProjection project_to_path(const Vec2 & point, const Polyline & path);

/// Zero inside the union of lane corridors (centerlines buffered by width / 2 with round caps),
/// otherwise the Euclidean distance to that region.
double road_sdf(const Vec2 & point, const std::vector<LaneSegment> & lanes);

struct SdfSample
{
  double value{0.0};
  /// d value / d point; zero inside the road.
  Vec2 gradient;
};
SdfSample road_sdf_with_gradient(const Vec2 & point, const std::vector<LaneSegment> & lanes);

/// Ego positions over the horizon: the recorded log when present, otherwise constant-speed
/// travel along the reference path.
std::vector<KinematicState> ego_log_states(const Scenario & scenario);

const char * to_string(LaneKind kind);
const char * to_string(AgentKind kind);

}  // namespace occrisk

#endif  // OCCRISK__SCENE_HPP_
