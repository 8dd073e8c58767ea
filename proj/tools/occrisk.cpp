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

// occrisk command-line driver: demo | generate | risk | plan | eval | pipeline | plot.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "occrisk/config.hpp"
#include "occrisk/errors.hpp"
#include "occrisk/harness.hpp"

namespace
{

using namespace occrisk;

struct CommonOptions
{
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
  std::vector<std::string> inputs;
  std::string grids;
  std::string plans;
  std::vector<std::string> planners;
  std::string collision_ego;
  std::vector<std::string> figures;
  std::optional<int> count;
};

void add_common(CLI::App * cmd, CommonOptions & o)
{
  cmd->add_option("--config", o.config_path, "JSON config; unknown keys are rejected")
    ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Global seed (overrides the config)");
  cmd->add_option("--jobs", o.jobs, "Scenarios processed in parallel")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory")->required();
}

RunConfig resolve(const CommonOptions & o)
{
  RunConfig config = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed) {
    config.seed = *o.seed;
  }
  if (o.jobs) {
    config.jobs = *o.jobs;
  }
  if (o.count) {
    config.demo_count = *o.count;
  }
  if (!o.collision_ego.empty()) {
    config.collision_ego = o.collision_ego == "noap" ? CollisionEgo::noap : CollisionEgo::log;
  }
  if (!o.planners.empty()) {
    config.planning.planners.clear();
    for (const auto & name : o.planners) {
      config.planning.planners.push_back(planner_kind_from_string(name));
    }
  }
  return config;
}

std::vector<fs::path> inputs_or(const CommonOptions & o, const fs::path & fallback)
{
  if (o.inputs.empty()) {
    return collect_scenario_files({fallback.string()});
  }
  return collect_scenario_files(o.inputs);
}

fs::path dir_or(const std::string & given, const fs::path & fallback)
{
  return given.empty() ? fallback : fs::path(given);
}

int finish(const char * stage, const StageReport & report)
{
  for (const auto & f : report.failures) {
    std::fprintf(stderr, "%s: %s\n", stage, f.c_str());
  }
  std::fprintf(
    stderr, "%s: %d processed, %zu failed\n", stage, report.processed, report.failures.size());
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Occlusion-aware risk toolkit"};
  app.require_subcommand(1);
  CommonOptions o;

  auto * demo = app.add_subcommand("demo", "Write the synthetic demo suite to <out>/scenarios");
  add_common(demo, o);
  demo->add_option("--count", o.count, "Number of scenarios (overrides demo_count)")
    ->check(CLI::NonNegativeNumber);

  auto * generate = app.add_subcommand("generate", "Augment scenarios with guided phantoms");
  add_common(generate, o);
  generate->add_option(
    "inputs", o.inputs, "Scenario files or directories (default <out>/scenarios)");

  auto * risk = app.add_subcommand("risk", "Build risk grids for augmented scenarios");
  add_common(risk, o);
  risk->add_option("inputs", o.inputs, "Scenario files or directories (default <out>/augmented)");
  risk->add_option("--collision-ego", o.collision_ego, "Ego motion for collision risk")
    ->check(CLI::IsMember({"log", "noap"}));

  auto * plan = app.add_subcommand("plan", "Run speed planners against the risk grids");
  add_common(plan, o);
  plan->add_option("inputs", o.inputs, "Scenario files or directories (default <out>/augmented)");
  plan->add_option("--grids", o.grids, "Grid directory (default <out>/grids)");
  plan->add_option("--planners", o.planners, "risk_aware, noap, srq, opbp")->delimiter(',');

  auto * eval = app.add_subcommand("eval", "Metrics per scenario and planner");
  add_common(eval, o);
  eval->add_option("inputs", o.inputs, "Scenario files or directories (default <out>/augmented)");
  eval->add_option("--grids", o.grids, "Grid directory (default <out>/grids)");
  eval->add_option("--plans", o.plans, "Plan directory (default <out>/plans)");

  auto * pipeline = app.add_subcommand("pipeline", "demo/generate/risk/plan/eval end to end");
  add_common(pipeline, o);
  pipeline->add_option("inputs", o.inputs, "Scenario files or directories (default: demo suite)");
  pipeline->add_option("--planners", o.planners, "risk_aware, noap, srq, opbp")->delimiter(',');
  pipeline->add_option("--collision-ego", o.collision_ego, "Ego motion for collision risk")
    ->check(CLI::IsMember({"log", "noap"}));

  auto * plot = app.add_subcommand("plot", "Render figures from a run directory");
  add_common(plot, o);
  plot->add_option("ids", o.inputs, "Scenario ids (default: every plan in <out>/plans)");
  plot->add_option("--fig", o.figures, "heatmap and/or profile")
    ->delimiter(',')
    ->check(CLI::IsMember({"heatmap", "profile"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig base = resolve(o);
    const RunLayout layout{o.out};

    if (demo->parsed()) {
      write_resolved_config(base, o.out);
      return finish("demo", cmd_demo(base, o.out));
    }
    if (generate->parsed()) {
      write_resolved_config(base, o.out);
      return finish("generate", cmd_generate(base, inputs_or(o, layout.scenarios()), o.out));
    }
    if (risk->parsed()) {
      write_resolved_config(base, o.out);
      return finish("risk", cmd_risk(base, inputs_or(o, layout.augmented()), o.out));
    }
    if (plan->parsed()) {
      write_resolved_config(base, o.out);
      return finish(
        "plan", cmd_plan(
                  base, inputs_or(o, layout.augmented()), dir_or(o.grids, layout.grids()),
                  base.planning.planners, o.out));
    }
    if (eval->parsed()) {
      write_resolved_config(base, o.out);
      return finish(
        "eval", cmd_eval(
                  base, inputs_or(o, layout.augmented()), dir_or(o.grids, layout.grids()),
                  dir_or(o.plans, layout.plans()), o.out));
    }
    if (pipeline->parsed()) {
      RunConfig config = base;
      if (!o.inputs.empty()) {
        config.scenarios = o.inputs;
      }
      return finish("pipeline", cmd_pipeline(config, o.out));
    }
    if (plot->parsed()) {
      std::vector<std::string> ids = o.inputs;
      if (ids.empty() && fs::is_directory(layout.plans())) {
        for (const auto & f : collect_scenario_files({layout.plans().string()})) {
          ids.push_back(scenario_id(f));
        }
      }
      std::vector<FigureKind> kinds;
      for (const auto & f : o.figures) {
        kinds.push_back(f == "heatmap" ? FigureKind::heatmap : FigureKind::profile);
      }
      if (kinds.empty()) {
        kinds = {FigureKind::heatmap, FigureKind::profile};
      }
      return finish("plot", cmd_plot(base, o.out, ids, kinds));
    }
  } catch (const UsageError & e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
