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

#ifndef OCCRISK__PIPELINE_HPP_
#define OCCRISK__PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "occrisk/config.hpp"
#include "occrisk/metrics.hpp"
#include "occrisk/planner.hpp"
#include "occrisk/risk_field.hpp"
#include "occrisk/scene.hpp"

namespace occrisk
{

/// Seed for one scenario, derived from the global seed and the scenario id so results do not
/// depend on processing order.
std::uint64_t scenario_seed(std::uint64_t global_seed, const std::string & scenario_id);

struct GenerationRow
{
  std::string scenario;
  std::string phantom;
  std::uint64_t seed{0};
  int steps{0};
  double interaction_weight{0.0};
  double road_weight{0.0};
  double step_scale{0.0};
  double nominal_closest_approach{0.0};
  double closest_approach{0.0};
  double onroad_fraction{1.0};
};

struct GenerationOutput
{
  Scenario scenario;
  std::vector<GenerationRow> rows;
};

/// Field of view at t = 0 and its occluded lane segments.
std::vector<OccludedSegment> initial_occlusions(
  const Scenario & scenario, const RunConfig & config);

/// Samples phantoms in the occluded segments and replaces each one's state list with its guided
/// trajectory. Phantoms already present in the input are dropped first.
GenerationOutput generate_scenario(
  const Scenario & scenario, const std::string & id, const RunConfig & config);

/// Same phantoms, each extrapolated at constant velocity (the rule-based baseline).
Scenario constant_velocity_phantoms(const Scenario & generated);

/// Multimodal predictions for every active agent, phantoms from their initial states only.
TrajectorySet predict(const Scenario & scenario, const RunConfig & config);

RiskGrid build_scenario_risk(const Scenario & scenario, const RunConfig & config);

struct PlanRecord
{
  PlannerKind kind{PlannerKind::noap};
  /// Empty on success.
  std::string error;
  PlanResult result;
  double path_offset{0.0};
};

PlanRecord run_planner(
  PlannerKind kind, const Scenario & scenario, const RiskGrid & grid, const RunConfig & config);
/// Throws UsageError for an empty planner list.
std::vector<PlanRecord> plan_scenario(
  const Scenario & scenario, const RiskGrid & grid, const std::vector<PlannerKind> & planners,
  const RunConfig & config);

/// Every agent of a (generated) scenario as a TTC body, phantoms with their guided trajectories.
std::vector<TtcBody> scene_bodies(const Scenario & scenario);

EvalRow evaluate_plan(
  const std::string & id, const Scenario & scenario, const RiskGrid & grid,
  const PlanRecord & record, const RunConfig & config);

/// Scene-level generation metrics of a generated scenario against the ego log.
GenerationMetrics scenario_generation_metrics(const Scenario & generated, const RunConfig & config);

}  // namespace occrisk

#endif  // OCCRISK__PIPELINE_HPP_
