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

#ifndef OCCRISK__PLANNER_HPP_
#define OCCRISK__PLANNER_HPP_

#include <functional>
#include <string>
#include <vector>

#include "occrisk/geometry.hpp"
#include "occrisk/risk_field.hpp"
#include "occrisk/scene.hpp"
#include "occrisk/trajgen.hpp"
#include "occrisk/visibility.hpp"

namespace occrisk
{

enum class PlannerKind { risk_aware, noap, srq, opbp };

const char * to_string(PlannerKind kind);
PlannerKind planner_kind_from_string(const std::string & name);

struct PlannerWeights
{
  double w1{1.0};
  double w2{0.05};
  double w3{50.0};
  double w4{10.0};
  /// Target travel distance; negative means "use the scenario's ego d_desired".
  double d_desired{-1.0};
  double v_cap{15.0};
  double a_max{3.0};
  /// Penalize only the final position in the reach term.
  bool terminal_reach{false};
};

struct SolverConfig
{
  int max_iterations{20};
  /// Outer stop: max |dv| between iterates, m/s.
  double step_tolerance{1e-3};
  double qp_tolerance{1e-6};
  int qp_max_iterations{20000};
  /// Also start from ramps toward `start_levels` cruise speeds in [0, v_cap] and keep the best.
  bool multistart{true};
  int start_levels{5};
};

/// Speeds v_0..v_{T-1}; s holds the travelled distance d_0 = 0 .. d_T with d_{i+1} = d_i + v_i dt.
struct VelocityProfile
{
  double dt{0.1};
  std::vector<double> v;
  std::vector<double> s;

  static VelocityProfile from_speeds(std::vector<double> v, double dt);
};

struct CostBreakdown
{
  double smooth{0.0};
  double reach{0.0};
  double risk{0.0};
  double collision{0.0};
  double total{0.0};
};

/// An obstacle's centroid over time and its combined (ego + obstacle) disc radius.
struct PlanObstacle
{
  std::string id;
  std::vector<Vec2> positions;
  double radius{0.0};
};

/// R(s, t) at absolute path arc length s.
using RiskLookup = std::function<double(double s, double t)>;
/// Speed cap at absolute path arc length s, with its slope d cap / d s (used to linearize the
/// cap around the current iterate).
struct SpeedLimit
{
  std::function<double(double s)> value;
  std::function<double(double s)> slope;

  explicit operator bool() const { return static_cast<bool>(value); }
  double operator()(double s) const { return value(s); }
};

/// Everything the cost and the solver see. Distances in the cost are measured from the ego's
/// start; path lookups add `path_offset`.
struct PlanProblem
{
  Polyline path;
  double path_offset{0.0};
  double v0{0.0};
  double dt{0.1};
  int steps{80};
  double d_desired{0.0};
  PlannerWeights weights;
  RiskLookup risk;
  std::vector<PlanObstacle> obstacles;
  SpeedLimit speed_limit;
};

CostBreakdown cost(const VelocityProfile & profile, const PlanProblem & problem);

struct PlanResult
{
  PlannerKind kind{PlannerKind::noap};
  VelocityProfile profile;
  CostBreakdown cost;
  int iterations{0};
};

/// True when v is within [0, v_cap] and the speed limit, rate bounds hold between consecutive
/// speeds, and v_0 matches the problem, all to `tol`.
bool feasible(const VelocityProfile & profile, const PlanProblem & problem, double tol = 1e-9);

/// Sequential convexification: each outer iteration freezes R(s_i) and linearizes the obstacle
/// distances around the current iterate, solves the convex QP, re-integrates s, and stops when
/// the speeds move less than the step tolerance. Returns the best iterate under the true cost.
/// Throws Infeasible when the constraints admit no profile.
PlanResult solve_plan(
  const PlanProblem & problem, const SolverConfig & solver = {},
  const VelocityProfile * initial = nullptr);

/// Problem skeleton for the scenario's ego: path, start offset, v0, horizon, and the visible
/// (non-phantom) agents as obstacles.
PlanProblem make_problem(const Scenario & scenario, const PlannerWeights & weights);

PlanResult plan_noap(
  const Scenario & scenario, const PlannerWeights & weights, const SolverConfig & solver = {});

PlanResult plan_risk_aware(
  const Scenario & scenario, const AnchorRisk & risk, const PlannerWeights & weights,
  const SolverConfig & solver = {});

struct SrqParams
{
  double a_brake{4.0};
  double margin{2.0};
  /// Crossings shallower than this are treated as lane sharing, not conflicts (rad).
  double min_crossing_angle{0.2};
};

/// Path arc lengths ahead of the ego where the path crosses an occluded segment's lane or one
/// of its downstream successors.
std::vector<double> occluded_conflicts(
  const Scenario & scenario, const std::vector<OccludedSegment> & segments,
  const SrqParams & params = {});

/// v_limit(s) = sqrt(2 a_brake max(0, d_clear(s) - margin)), capped at v_cap.
SpeedLimit srq_speed_limit(
  const std::vector<double> & conflicts, const SrqParams & params, double v_cap);

PlanResult plan_srq(
  const Scenario & scenario, const FieldOfView & fov, const PlannerWeights & weights,
  const SrqParams & params = {}, const SolverConfig & solver = {},
  double sample_step = 0.5, double min_segment_length = 4.8);

/// NOAP plus, per phantom, the mode that comes closest to the ego's NOAP motion as an extra
/// obstacle.
PlanResult plan_opbp(
  const Scenario & scenario, const TrajectorySet & phantom_trajectories,
  const PlannerWeights & weights, const SolverConfig & solver = {});

/// Ego states along the path under a profile, T + 1 samples.
std::vector<KinematicState> profile_states(
  const VelocityProfile & profile, const Polyline & path, double path_offset);

}  // namespace occrisk

#endif  // OCCRISK__PLANNER_HPP_
