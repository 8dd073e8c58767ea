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

#ifndef OCCRISK__HARNESS_HPP_
#define OCCRISK__HARNESS_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "occrisk/config.hpp"
#include "occrisk/metrics.hpp"
#include "occrisk/pipeline.hpp"

namespace occrisk
{

namespace fs = std::filesystem;

/// Where each stage reads and writes inside an output directory.
struct RunLayout
{
  fs::path root;

  fs::path scenarios() const { return root / "scenarios"; }
  fs::path augmented() const { return root / "augmented"; }
  fs::path grids() const { return root / "grids"; }
  fs::path plans() const { return root / "plans"; }
  fs::path figures() const { return root / "figures"; }
  fs::path resolved_config() const { return root / "config.resolved"; }
  fs::path generation_report() const { return root / "generation_report.csv"; }
  fs::path eval_report() const { return root / "eval_report.csv"; }
  fs::path generation_metrics() const { return root / "generation_metrics.csv"; }
};

/// Outcome of one stage. A stage succeeds only when no input failed.
struct StageReport
{
  int processed{0};
  /// "<input>: <message>", sorted.
  std::vector<std::string> failures;
  /// Files written per scenario (scenario files, grids or plans), sorted.
  std::vector<fs::path> outputs;

  bool ok() const { return failures.empty(); }
  void merge(const StageReport & other);
};

/// Files and directories to a sorted list of scenario files; directories contribute their
/// `*.json` entries. Throws UsageError for a path that does not exist.
std::vector<fs::path> collect_scenario_files(const std::vector<std::string> & inputs);
/// Scenario id of a file: its stem.
std::string scenario_id(const fs::path & file);

/// Runs fn(0..count-1) on up to `jobs` threads. Exceptions escaping fn are rethrown after all
/// workers finish (the first one by index).
void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)> & fn);

void write_resolved_config(const RunConfig & config, const fs::path & out_dir);

// Plan records ----------------------------------------------------------------------------

std::string serialize_plans(const std::string & id, const std::vector<PlanRecord> & records);
/// Throws FormatError on malformed input.
std::vector<PlanRecord> parse_plans(const std::string & text);
fs::path plan_file(const fs::path & plans_dir, const std::string & id);
fs::path grid_file(const fs::path & grids_dir, const std::string & id);

// Reports ---------------------------------------------------------------------------------

std::string format_generation_report(const std::vector<GenerationRow> & rows);

struct GenerationMetricsRow
{
  std::string scenario;
  /// "guided" or "constant_velocity".
  std::string phantoms;
  GenerationMetrics metrics;
};

/// One row per (scenario, phantom set) plus a footer of means per phantom set.
std::string format_generation_metrics(const std::vector<GenerationMetricsRow> & rows);

// Stages ----------------------------------------------------------------------------------

/// Writes config.demo_count synthetic scenarios to <out>/scenarios.
StageReport cmd_demo(const RunConfig & config, const fs::path & out);

/// Augments every input with guided phantoms: <out>/augmented/<id>.json and
/// <out>/generation_report.csv.
StageReport cmd_generate(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & out);

/// Risk grid per input: <out>/grids/<id>.grid and <id>.pgm.
StageReport cmd_risk(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & out);

/// Runs `planners` per input against <grids>/<id>.grid: <out>/plans/<id>.json. Infeasible and
/// other planner errors are recorded in the plan file; missing or malformed inputs fail the
/// scenario. Throws UsageError for an empty planner list.
StageReport cmd_plan(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & grids,
  const std::vector<PlannerKind> & planners, const fs::path & out);

/// Metrics per (scenario, planner) from the plan files: <out>/eval_report.csv and
/// <out>/generation_metrics.csv. Missing artifacts become error rows and fail the stage.
StageReport cmd_eval(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & grids,
  const fs::path & plans, const fs::path & out);

enum class FigureKind { heatmap, profile };

/// Figures for the given ids from <run>/augmented, <run>/grids and <run>/plans into
/// <run>/figures: <id>_heatmap.ppm and <id>_profile.ppm.
StageReport cmd_plot(
  const RunConfig & config, const fs::path & run, const std::vector<std::string> & ids,
  const std::vector<FigureKind> & kinds);

/// demo (when config.scenarios is empty) -> generate -> risk -> plan -> eval -> figures.
StageReport cmd_pipeline(const RunConfig & config, const fs::path & out);

}  // namespace occrisk

#endif  // OCCRISK__HARNESS_HPP_
