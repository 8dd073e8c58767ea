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

#include "occrisk/config.hpp"

#include <string_view>

#include "occrisk/errors.hpp"
#include "occrisk/scenario_io.hpp"

namespace occrisk
{

using nlohmann::json;

namespace
{

/// Reads `obj[key]` into `out` when present, reporting type errors with the key path.
template <typename T>
void read(const json & obj, const char * key, T & out, std::string_view context)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return;
  }
  try {
    out = it->get<T>();
  } catch (const json::exception &) {
    throw FormatError(std::string(context) + "." + key + ": wrong type");
  }
}

const json & object(const json & obj, const char * key, std::string_view context)
{
  static const json empty = json::object();
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return empty;
  }
  if (!it->is_object()) {
    throw FormatError(std::string(context) + "." + key + ": expected an object");
  }
  return *it;
}

const char * to_string(GradientMode mode)
{
  return mode == GradientMode::analytic ? "analytic" : "finite_difference";
}

}  // namespace

json config_to_json(const RunConfig & c)
{
  json planners = json::array();
  for (const auto kind : c.planning.planners) {
    planners.push_back(to_string(kind));
  }
  const auto & g = c.diffusion.guidance;
  const auto & mm = c.prediction.multimodal;
  const auto & w = c.planning.weights;
  const auto & sv = c.planning.solver;
  return {
    {"seed", c.seed},
    {"jobs", c.jobs},
    {"demo_count", c.demo_count},
    {"figures", c.figures},
    {"scenarios", c.scenarios},
    {"visibility",
     {{"ray_count", c.visibility.ray_count},
      {"max_range", c.visibility.max_range},
      {"sample_step", c.visibility.sample_step},
      {"min_segment_length", c.visibility.min_segment_length}}},
    {"phantom",
     {{"speed_min", c.phantom.speed_min},
      {"speed_max", c.phantom.speed_max},
      {"max_phantoms_per_segment", c.phantom.max_phantoms_per_segment},
      {"spacing_min", c.phantom.spacing_min},
      {"half_length", c.phantom.footprint.half_length},
      {"half_width", c.phantom.footprint.half_width},
      {"max_attempts", c.phantom.max_attempts}}},
    {"diffusion",
     {{"steps", c.diffusion.steps},
      {"cosine_offset", c.diffusion.cosine_offset},
      {"accel_std", c.diffusion.accel_std},
      {"yaw_rate_std", c.diffusion.yaw_rate_std},
      {"maneuver_accel_std", c.diffusion.maneuver.accel_std},
      {"maneuver_yaw_rate_std", c.diffusion.maneuver.yaw_rate_std},
      {"maneuver_modes", c.diffusion.maneuver.count},
      {"interaction_weight", g.interaction_weight},
      {"road_weight", g.road_weight},
      {"step_scale", g.step_scale},
      {"temperature", g.temperature},
      {"gradient", to_string(g.mode)},
      {"fd_step", g.fd_step}}},
    {"prediction",
     {{"v_min", c.prediction.v_min},
      {"modes", mm.modes},
      {"route_depth", mm.route_depth},
      {"max_accel", mm.limits.max_accel},
      {"max_yaw_rate", mm.limits.max_yaw_rate},
      {"min_lookahead", mm.pursuit.min_lookahead},
      {"lookahead_time", mm.pursuit.lookahead_time},
      {"steering_gain", mm.pursuit.steering_gain},
      {"speed_gain", mm.pursuit.speed_gain},
      {"route_extension", mm.pursuit.route_extension}}},
    {"risk",
     {{"decay", c.risk.decay},
      {"delta", c.risk.delta},
      {"alpha", c.risk.alpha},
      {"beta", c.risk.beta},
      {"sigma_cells", c.risk.sigma_cells},
      {"resolution", c.risk.resolution},
      {"margin", c.risk.margin},
      {"time_discount", c.risk.time_discount},
      {"time_bins", c.risk.time_bins},
      {"bin_count", c.risk.bin_count},
      {"bin_width", c.risk.bin_width},
      {"collision_ego", c.collision_ego == CollisionEgo::log ? "log" : "noap"}}},
    {"planning",
     {{"planners", planners},
      {"w1", w.w1},
      {"w2", w.w2},
      {"w3", w.w3},
      {"w4", w.w4},
      {"d_desired", w.d_desired},
      {"v_cap", w.v_cap},
      {"a_max", w.a_max},
      {"terminal_reach", w.terminal_reach},
      {"max_iterations", sv.max_iterations},
      {"step_tolerance", sv.step_tolerance},
      {"qp_tolerance", sv.qp_tolerance},
      {"qp_max_iterations", sv.qp_max_iterations},
      {"multistart", sv.multistart},
      {"start_levels", sv.start_levels},
      {"srq_a_brake", c.planning.srq.a_brake},
      {"srq_margin", c.planning.srq.margin},
      {"srq_min_crossing_angle", c.planning.srq.min_crossing_angle},
      {"anchor_count", c.planning.anchor_count}}},
    {"metrics",
     {{"ttc_cap", c.metrics.ttc_cap},
      {"critical_threshold", c.metrics.critical_threshold},
      {"interaction_radius", c.metrics.interaction_radius},
      {"v_min", c.metrics.v_min}}},
  };
}

RunConfig config_from_json(const json & doc)
{
  if (!doc.is_object()) {
    throw FormatError("config: expected an object");
  }
  require_known_keys(
    doc,
    {"seed", "jobs", "demo_count", "figures", "scenarios", "visibility", "phantom", "diffusion",
     "prediction", "risk", "planning", "metrics"},
    "config");
  RunConfig c;
  read(doc, "seed", c.seed, "config");
  read(doc, "jobs", c.jobs, "config");
  read(doc, "demo_count", c.demo_count, "config");
  read(doc, "figures", c.figures, "config");
  read(doc, "scenarios", c.scenarios, "config");

  const auto & vis = object(doc, "visibility", "config");
  require_known_keys(vis, {"ray_count", "max_range", "sample_step", "min_segment_length"},
    "config.visibility");
  read(vis, "ray_count", c.visibility.ray_count, "visibility");
  read(vis, "max_range", c.visibility.max_range, "visibility");
  read(vis, "sample_step", c.visibility.sample_step, "visibility");
  read(vis, "min_segment_length", c.visibility.min_segment_length, "visibility");

  const auto & ph = object(doc, "phantom", "config");
  require_known_keys(
    ph,
    {"speed_min", "speed_max", "max_phantoms_per_segment", "spacing_min", "half_length",
     "half_width", "max_attempts"},
    "config.phantom");
  read(ph, "speed_min", c.phantom.speed_min, "phantom");
  read(ph, "speed_max", c.phantom.speed_max, "phantom");
  read(ph, "max_phantoms_per_segment", c.phantom.max_phantoms_per_segment, "phantom");
  read(ph, "spacing_min", c.phantom.spacing_min, "phantom");
  read(ph, "half_length", c.phantom.footprint.half_length, "phantom");
  read(ph, "half_width", c.phantom.footprint.half_width, "phantom");
  read(ph, "max_attempts", c.phantom.max_attempts, "phantom");

  const auto & df = object(doc, "diffusion", "config");
  require_known_keys(
    df,
    {"steps", "cosine_offset", "accel_std", "yaw_rate_std", "maneuver_accel_std",
     "maneuver_yaw_rate_std", "maneuver_modes", "interaction_weight", "road_weight",
     "step_scale", "temperature", "gradient", "fd_step"},
    "config.diffusion");
  auto & g = c.diffusion.guidance;
  read(df, "steps", c.diffusion.steps, "diffusion");
  read(df, "cosine_offset", c.diffusion.cosine_offset, "diffusion");
  read(df, "accel_std", c.diffusion.accel_std, "diffusion");
  read(df, "yaw_rate_std", c.diffusion.yaw_rate_std, "diffusion");
  read(df, "maneuver_accel_std", c.diffusion.maneuver.accel_std, "diffusion");
  read(df, "maneuver_yaw_rate_std", c.diffusion.maneuver.yaw_rate_std, "diffusion");
  read(df, "maneuver_modes", c.diffusion.maneuver.count, "diffusion");
  read(df, "interaction_weight", g.interaction_weight, "diffusion");
  read(df, "road_weight", g.road_weight, "diffusion");
  read(df, "step_scale", g.step_scale, "diffusion");
  read(df, "temperature", g.temperature, "diffusion");
  read(df, "fd_step", g.fd_step, "diffusion");
  std::string mode = to_string(g.mode);
  read(df, "gradient", mode, "diffusion");
  if (mode == "analytic") {
    g.mode = GradientMode::analytic;
  } else if (mode == "finite_difference") {
    g.mode = GradientMode::finite_difference;
  } else {
    throw FormatError("diffusion.gradient: unknown mode " + mode);
  }

  const auto & pr = object(doc, "prediction", "config");
  require_known_keys(
    pr,
    {"v_min", "modes", "route_depth", "max_accel", "max_yaw_rate", "min_lookahead",
     "lookahead_time", "steering_gain", "speed_gain", "route_extension"},
    "config.prediction");
  auto & mm = c.prediction.multimodal;
  read(pr, "v_min", c.prediction.v_min, "prediction");
  read(pr, "modes", mm.modes, "prediction");
  read(pr, "route_depth", mm.route_depth, "prediction");
  read(pr, "max_accel", mm.limits.max_accel, "prediction");
  read(pr, "max_yaw_rate", mm.limits.max_yaw_rate, "prediction");
  read(pr, "min_lookahead", mm.pursuit.min_lookahead, "prediction");
  read(pr, "lookahead_time", mm.pursuit.lookahead_time, "prediction");
  read(pr, "steering_gain", mm.pursuit.steering_gain, "prediction");
  read(pr, "speed_gain", mm.pursuit.speed_gain, "prediction");
  read(pr, "route_extension", mm.pursuit.route_extension, "prediction");

  const auto & rk = object(doc, "risk", "config");
  require_known_keys(
    rk,
    {"decay", "delta", "alpha", "beta", "sigma_cells", "resolution", "margin", "time_discount",
     "time_bins", "bin_count", "bin_width", "collision_ego"},
    "config.risk");
  read(rk, "decay", c.risk.decay, "risk");
  read(rk, "delta", c.risk.delta, "risk");
  read(rk, "alpha", c.risk.alpha, "risk");
  read(rk, "beta", c.risk.beta, "risk");
  read(rk, "sigma_cells", c.risk.sigma_cells, "risk");
  read(rk, "resolution", c.risk.resolution, "risk");
  read(rk, "margin", c.risk.margin, "risk");
  read(rk, "time_discount", c.risk.time_discount, "risk");
  read(rk, "time_bins", c.risk.time_bins, "risk");
  read(rk, "bin_count", c.risk.bin_count, "risk");
  read(rk, "bin_width", c.risk.bin_width, "risk");
  std::string ego = "log";
  read(rk, "collision_ego", ego, "risk");
  if (ego == "log") {
    c.collision_ego = CollisionEgo::log;
  } else if (ego == "noap") {
    c.collision_ego = CollisionEgo::noap;
  } else {
    throw FormatError("risk.collision_ego: expected \"log\" or \"noap\"");
  }

  const auto & pl = object(doc, "planning", "config");
  require_known_keys(
    pl,
    {"planners", "w1", "w2", "w3", "w4", "d_desired", "v_cap", "a_max", "terminal_reach",
     "max_iterations", "step_tolerance", "qp_tolerance", "qp_max_iterations", "multistart",
     "start_levels", "srq_a_brake", "srq_margin", "srq_min_crossing_angle", "anchor_count"},
    "config.planning");
  if (pl.contains("planners")) {
    std::vector<std::string> names;
    read(pl, "planners", names, "planning");
    c.planning.planners.clear();
    for (const auto & n : names) {
      try {
        c.planning.planners.push_back(planner_kind_from_string(n));
      } catch (const UsageError & e) {
        throw FormatError(std::string("planning.planners: ") + e.what());
      }
    }
  }
  auto & w = c.planning.weights;
  auto & sv = c.planning.solver;
  read(pl, "w1", w.w1, "planning");
  read(pl, "w2", w.w2, "planning");
  read(pl, "w3", w.w3, "planning");
  read(pl, "w4", w.w4, "planning");
  read(pl, "d_desired", w.d_desired, "planning");
  read(pl, "v_cap", w.v_cap, "planning");
  read(pl, "a_max", w.a_max, "planning");
  read(pl, "terminal_reach", w.terminal_reach, "planning");
  read(pl, "max_iterations", sv.max_iterations, "planning");
  read(pl, "step_tolerance", sv.step_tolerance, "planning");
  read(pl, "qp_tolerance", sv.qp_tolerance, "planning");
  read(pl, "qp_max_iterations", sv.qp_max_iterations, "planning");
  read(pl, "multistart", sv.multistart, "planning");
  read(pl, "start_levels", sv.start_levels, "planning");
  read(pl, "srq_a_brake", c.planning.srq.a_brake, "planning");
  read(pl, "srq_margin", c.planning.srq.margin, "planning");
  read(pl, "srq_min_crossing_angle", c.planning.srq.min_crossing_angle, "planning");
  read(pl, "anchor_count", c.planning.anchor_count, "planning");

  const auto & mt = object(doc, "metrics", "config");
  require_known_keys(
    mt, {"ttc_cap", "critical_threshold", "interaction_radius", "v_min"}, "config.metrics");
  read(mt, "ttc_cap", c.metrics.ttc_cap, "metrics");
  read(mt, "critical_threshold", c.metrics.critical_threshold, "metrics");
  read(mt, "interaction_radius", c.metrics.interaction_radius, "metrics");
  read(mt, "v_min", c.metrics.v_min, "metrics");

  if (c.jobs < 1) {
    throw FormatError("config.jobs must be at least 1");
  }
  if (c.demo_count < 0) {
    throw FormatError("config.demo_count must be non-negative");
  }
  if (c.figures < 0) {
    throw FormatError("config.figures must be non-negative");
  }
  if (!c.phantom.valid()) {
    throw FormatError("config.phantom: inconsistent ranges");
  }
  if (c.diffusion.steps < 1 || !(g.temperature > 0.0) || g.step_scale < 0.0) {
    throw FormatError("config.diffusion: steps >= 1, temperature > 0, step_scale >= 0 required");
  }
  if (w.w1 < 0.0 || w.w2 < 0.0 || w.w3 < 0.0 || w.w4 < 0.0) {
    throw FormatError("config.planning: weights must be non-negative");
  }
  return c;
}

RunConfig load_config(const std::string & path)
{
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error & e) {
    throw FormatError(path + ": " + e.what());
  }
  return config_from_json(doc);
}

std::string resolved_config_text(const RunConfig & config)
{
  return config_to_json(config).dump(2) + "\n";
}

}  // namespace occrisk
