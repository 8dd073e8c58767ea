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

#include "occrisk/pipeline.hpp"

#include <algorithm>
#include <optional>

#include "occrisk/errors.hpp"
#include "occrisk/guided_gen.hpp"
#include "occrisk/phantom_sampler.hpp"
#include "occrisk/rng.hpp"
#include "occrisk/visibility.hpp"

namespace occrisk
{

std::uint64_t scenario_seed(std::uint64_t global_seed, const std::string & scenario_id)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : scenario_id) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return CounterRng(global_seed).substream(h).key();
}

std::vector<OccludedSegment> initial_occlusions(
  const Scenario & scenario, const RunConfig & config)
{
  const auto fov = cast_fov(
    scenario, scenario.ego.initial.position(), 0.0, config.visibility.ray_count,
    config.visibility.max_range);
  return occluded_segments(
    scenario, fov, config.visibility.sample_step, config.visibility.min_segment_length);
}

namespace
{

Scenario without_phantoms(const Scenario & scenario)
{
  Scenario out = scenario;
  std::erase_if(out.agents, [](const AgentLog & a) { return a.kind == AgentKind::phantom; });
  out.phantoms.clear();
  out.metadata.erase("phantom_seed");
  return out;
}

void assign_states(AgentLog & agent, const std::vector<KinematicState> & states, double dt)
{
  agent.states.clear();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto & s = states[i];
    agent.states.push_back({dt * static_cast<double>(i), s.x, s.y, s.heading, s.speed});
  }
}

}  // namespace

GenerationOutput generate_scenario(
  const Scenario & input, const std::string & id, const RunConfig & config)
{
  const Scenario scenario = without_phantoms(input);
  const std::uint64_t seed = scenario_seed(config.seed, id);
  const auto fov = cast_fov(
    scenario, scenario.ego.initial.position(), 0.0, config.visibility.ray_count,
    config.visibility.max_range);
  const auto segments = occluded_segments(
    scenario, fov, config.visibility.sample_step, config.visibility.min_segment_length);

  PhantomConfig pcfg = config.phantom;
  pcfg.rng_seed = seed;
  GenerationOutput out;
  out.scenario = sample_phantoms(scenario, segments, pcfg, &fov);

  const auto schedule =
    DiffusionSchedule::cosine(config.diffusion.steps, config.diffusion.cosine_offset);
  const NominalPriorDenoiser denoiser(
    config.diffusion.accel_std, config.diffusion.yaw_rate_std, config.diffusion.maneuver);
  const std::vector<std::vector<Vec2>> others{positions(ego_log_states(scenario))};
  const auto & mm = config.prediction.multimodal;
  const CounterRng root = CounterRng(seed).substream(0x67756964ULL);

  for (std::size_t i = 0; i < out.scenario.agents.size(); ++i) {
    AgentLog & agent = out.scenario.agents[i];
    if (agent.kind != AgentKind::phantom) {
      continue;
    }
    const auto prior = make_phantom_prior(out.scenario, agent, others, mm);
    GuidanceScene gs;
    gs.initial = prior.initial;
    gs.dt = out.scenario.dt;
    gs.others = others;
    gs.lanes = &out.scenario.lanes;
    CounterRng rng = root.substream(i);
    const std::uint64_t phantom_seed = rng.key();
    const auto result =
      guided_reverse(prior, gs, schedule, denoiser, config.diffusion.guidance, mm.limits, rng);
    assign_states(agent, result.trajectory.states, out.scenario.dt);

    GenerationRow row;
    row.scenario = id;
    row.phantom = agent.id;
    row.seed = phantom_seed;
    row.steps = config.diffusion.steps;
    row.interaction_weight = config.diffusion.guidance.interaction_weight;
    row.road_weight = config.diffusion.guidance.road_weight;
    row.step_scale = config.diffusion.guidance.step_scale;
    row.nominal_closest_approach = result.nominal_closest_approach;
    row.closest_approach = result.closest_approach;
    row.onroad_fraction = result.onroad_fraction;
    out.rows.push_back(row);
  }
  return out;
}

Scenario constant_velocity_phantoms(const Scenario & generated)
{
  Scenario out = generated;
  for (auto & agent : out.agents) {
    if (agent.kind == AgentKind::phantom && !agent.states.empty()) {
      assign_states(agent, constant_velocity(agent, out.dt, out.steps()).states, out.dt);
    }
  }
  return out;
}

namespace
{

/// Phantoms reduced to their initial state: what a planner may know about them.
Scenario initial_phantoms(const Scenario & scenario)
{
  Scenario out = scenario;
  for (auto & agent : out.agents) {
    if (agent.kind == AgentKind::phantom && agent.states.size() > 1) {
      agent.states.resize(1);
    }
  }
  return out;
}

std::vector<KinematicState> collision_ego_states(
  const Scenario & scenario, const RunConfig & config)
{
  if (config.collision_ego == CollisionEgo::log) {
    return ego_log_states(scenario);
  }
  const auto plan = plan_noap(scenario, config.planning.weights, config.planning.solver);
  const auto pb = make_problem(scenario, config.planning.weights);
  return profile_states(plan.profile, pb.path, pb.path_offset);
}

}  // namespace

TrajectorySet predict(const Scenario & scenario, const RunConfig & config)
{
  const Scenario known = initial_phantoms(scenario);
  const auto active = filter_active(known, config.prediction.v_min);
  return multimodal_set(known, active, config.prediction.multimodal);
}

RiskGrid build_scenario_risk(const Scenario & scenario, const RunConfig & config)
{
  const Scenario known = initial_phantoms(scenario);
  const auto active = filter_active(known, config.prediction.v_min);
  const auto set = multimodal_set(known, active, config.prediction.multimodal);
  const auto spec = make_grid_spec(known, config.risk.resolution, config.risk.margin);
  return build_risk_grid(
    spec, set, active, collision_ego_states(known, config), known.dt, config.risk);
}

PlanRecord run_planner(
  PlannerKind kind, const Scenario & input, const RiskGrid & grid, const RunConfig & config)
{
  const Scenario scenario = initial_phantoms(input);
  const auto & pc = config.planning;
  PlanRecord rec;
  rec.kind = kind;
  try {
    const auto pb = make_problem(scenario, pc.weights);
    rec.path_offset = pb.path_offset;
    switch (kind) {
      case PlannerKind::noap:
        rec.result = plan_noap(scenario, pc.weights, pc.solver);
        break;
      case PlannerKind::risk_aware: {
        const double reach = pc.weights.v_cap * scenario.horizon;
        const double s_end = std::min(pb.path.length(), pb.path_offset + reach);
        const auto anchors = anchor_risks(
          grid, pb.path, pc.anchor_count, pb.path_offset, s_end, scenario.ego.initial.speed);
        rec.result = plan_risk_aware(scenario, anchors, pc.weights, pc.solver);
        break;
      }
      case PlannerKind::srq: {
        const auto fov = cast_fov(
          scenario, scenario.ego.initial.position(), 0.0, config.visibility.ray_count,
          config.visibility.max_range);
        rec.result = plan_srq(
          scenario, fov, pc.weights, pc.srq, pc.solver, config.visibility.sample_step,
          config.visibility.min_segment_length);
        break;
      }
      case PlannerKind::opbp: {
        TrajectorySet phantoms;
        for (auto & [agent_id, modes] : predict(scenario, config)) {
          const auto * agent = scenario.find_agent(agent_id);
          if (agent != nullptr && agent->kind == AgentKind::phantom) {
            phantoms.emplace(agent_id, std::move(modes));
          }
        }
        rec.result = plan_opbp(scenario, phantoms, pc.weights, pc.solver);
        break;
      }
    }
    rec.result.kind = kind;
  } catch (const Error & e) {
    rec.error = e.what();
    if (rec.error.empty()) {
      rec.error = "error";
    }
  }
  return rec;
}

std::vector<PlanRecord> plan_scenario(
  const Scenario & scenario, const RiskGrid & grid, const std::vector<PlannerKind> & planners,
  const RunConfig & config)
{
  if (planners.empty()) {
    throw UsageError("planner list is empty");
  }
  std::vector<PlanRecord> out;
  for (const auto kind : planners) {
    out.push_back(run_planner(kind, scenario, grid, config));
  }
  return out;
}

std::vector<TtcBody> scene_bodies(const Scenario & scenario)
{
  std::vector<TtcBody> out;
  for (const auto & agent : scenario.agents) {
    TtcBody b;
    b.id = agent.id;
    b.radius = footprint_radius(agent.footprint);
    for (const auto & s : agent.states) {
      b.states.push_back(s.kinematic());
    }
    out.push_back(std::move(b));
  }
  return out;
}

GenerationMetrics scenario_generation_metrics(const Scenario & generated, const RunConfig & config)
{
  std::vector<Trajectory> phantom_trajectories;
  for (const auto & agent : generated.agents) {
    if (agent.kind == AgentKind::phantom) {
      phantom_trajectories.push_back(log_trajectory(agent, generated.dt));
    }
  }
  if (phantom_trajectories.empty()) {
    for (const auto & agent : generated.agents) {
      phantom_trajectories.push_back(log_trajectory(agent, generated.dt));
    }
  }
  return generation_metrics(
    generated, phantom_trajectories, scene_bodies(generated), config.metrics);
}

EvalRow evaluate_plan(
  const std::string & id, const Scenario & scenario, const RiskGrid & grid,
  const PlanRecord & record, const RunConfig & config)
{
  EvalRow row;
  row.scenario = id;
  row.planner = to_string(record.kind);
  if (!record.error.empty()) {
    row.error = record.error;
    return row;
  }
  const auto & profile = record.result.profile;
  TtcBody ego{
    "ego", profile_states(profile, scenario.ego.reference_path, record.path_offset),
    footprint_radius(scenario.ego.footprint)};
  const auto m = ttc_matrix(ego, scene_bodies(scenario), config.metrics.ttc_cap);
  row.ttc_min = ttc_min(m);
  row.ttc_avg = ttc_avg(m);
  row.critical_moments = critical_moments(m, config.metrics.critical_threshold);
  row.risk_score = risk_score(positions(ego.states), profile.v, profile.dt, grid);
  const auto g = scenario_generation_metrics(scenario, config);
  row.onroad_rate = g.onroad_rate;
  row.offroad_dist = g.offroad_dist;
  row.interaction_agents = g.interaction_agents;
  return row;
}

}  // namespace occrisk
