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

#ifndef OCCRISK__METRICS_HPP_
#define OCCRISK__METRICS_HPP_

#include <functional>
#include <string>
#include <vector>

#include "occrisk/risk_field.hpp"
#include "occrisk/scene.hpp"
#include "occrisk/trajgen.hpp"

namespace occrisk
{

struct MetricParams
{
  double ttc_cap{100.0};
  double critical_threshold{3.0};
  double interaction_radius{20.0};
  double v_min{0.5};
};

/// A body for TTC purposes: states on the shared time grid and a disc radius.
struct TtcBody
{
  std::string id;
  std::vector<KinematicState> states;
  double radius{0.0};
};

/// Row-major (t, agent) matrix of time-to-collision values.
struct TtcMatrix
{
  std::size_t steps{0};
  std::size_t agents{0};
  double cap{100.0};
  std::vector<double> values;

  double at(std::size_t t, std::size_t k) const { return values[t * agents + k]; }
};

/// Smallest tau >= 0 at which two discs moving at constant velocity come within `radius`;
/// `cap` when they never do.
double time_to_collision(
  const Vec2 & p_ego, const Vec2 & v_ego, const Vec2 & p_agent, const Vec2 & v_agent,
  double radius, double cap);

/// TTC of the ego against every agent at every timestep both exist.
TtcMatrix ttc_matrix(const TtcBody & ego, const std::vector<TtcBody> & agents, double cap);

/// Minimum over all entries; the cap for an empty matrix.
double ttc_min(const TtcMatrix & m);
/// Mean over all entries; the cap for an empty matrix.
double ttc_avg(const TtcMatrix & m);
/// Timesteps whose minimum TTC is strictly below the threshold.
int critical_moments(const TtcMatrix & m, double threshold = 3.0);

/// sum_i risk(p_i) * v_i * dt over the first v.size() positions.
double risk_score(
  const std::vector<Vec2> & positions, const std::vector<double> & speeds, double dt,
  const std::function<double(const Vec2 &)> & risk);
double risk_score(
  const std::vector<Vec2> & positions, const std::vector<double> & speeds, double dt,
  const RiskGrid & grid);

struct GenerationMetrics
{
  double ttc{0.0};
  double onroad_rate{1.0};
  double offroad_dist{0.0};
  int interaction_agents{0};
};

/// Scene-level generation metrics. `generated` holds the trajectories whose road adherence is
/// measured; `scene_agents` are all bodies that count for TTC and interaction (logged vehicles
/// plus phantoms).
GenerationMetrics generation_metrics(
  const Scenario & scenario, const std::vector<Trajectory> & generated,
  const std::vector<TtcBody> & scene_agents, const MetricParams & params = {});

/// Logged vehicles of a scenario as TTC bodies.
std::vector<TtcBody> logged_bodies(const Scenario & scenario);
TtcBody body_from_trajectory(const Trajectory & traj, const Footprint & footprint);

struct EvalRow
{
  std::string scenario;
  std::string planner;
  double ttc_min{0.0};
  double ttc_avg{0.0};
  double risk_score{0.0};
  int critical_moments{0};
  double onroad_rate{1.0};
  double offroad_dist{0.0};
  int interaction_agents{0};
  /// Empty on success; otherwise the reason the row has no metrics.
  std::string error;
};

/// Comma-separated table, one row per entry in the given order, then a "mean" footer over the
/// rows without error.
std::string format_eval_report(const std::vector<EvalRow> & rows);

}  // namespace occrisk

#endif  // OCCRISK__METRICS_HPP_
