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

#ifndef OCCRISK__CONFIG_HPP_
#define OCCRISK__CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "occrisk/guided_gen.hpp"
#include "occrisk/metrics.hpp"
#include "occrisk/phantom_sampler.hpp"
#include "occrisk/planner.hpp"
#include "occrisk/risk_field.hpp"
#include "occrisk/trajgen.hpp"
#include "occrisk/visibility.hpp"

namespace occrisk
{

enum class CollisionEgo { log, noap };

struct DiffusionConfig
{
  int steps{50};
  double cosine_offset{0.008};
  double accel_std{0.15};
  double yaw_rate_std{0.015};
  ManeuverModes maneuver{0.5, 0.0, 3};
  GuidanceConfig guidance{.step_scale = 2.0};
};

struct PredictionConfig
{
  double v_min{0.5};
  MultimodalConfig multimodal;
};

struct PlanningConfig
{
  std::vector<PlannerKind> planners{
    PlannerKind::risk_aware, PlannerKind::noap, PlannerKind::srq, PlannerKind::opbp};
  PlannerWeights weights{.w3 = 5000.0};
  SolverConfig solver;
  SrqParams srq;
  int anchor_count{20};
};

/// Every tunable of the pipeline. Parsing rejects unknown keys at any level; serialization
/// writes every field, defaults included.
struct RunConfig
{
  std::uint64_t seed{0};
  int jobs{1};
  int demo_count{50};
  /// Scenarios, in id order, that get figures in a pipeline run.
  int figures{1};
  /// Scenario files or directories; empty means the demo suite.
  std::vector<std::string> scenarios;
  VisibilityConfig visibility;
  PhantomConfig phantom;
  DiffusionConfig diffusion;
  PredictionConfig prediction;
  RiskParams risk;
  CollisionEgo collision_ego{CollisionEgo::log};
  PlanningConfig planning;
  MetricParams metrics;
};

nlohmann::json config_to_json(const RunConfig & config);
/// Overlays `doc` on the defaults. Throws FormatError on unknown keys or wrong types.
RunConfig config_from_json(const nlohmann::json & doc);
RunConfig load_config(const std::string & path);
/// Pretty-printed JSON of the fully materialized configuration.
std::string resolved_config_text(const RunConfig & config);

}  // namespace occrisk

#endif  // OCCRISK__CONFIG_HPP_
