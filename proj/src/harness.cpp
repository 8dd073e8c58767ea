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

#include "occrisk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <json.hpp>

#include "occrisk/demo.hpp"
#include "occrisk/errors.hpp"
#include "occrisk/plot.hpp"
#include "occrisk/scenario_io.hpp"

namespace occrisk
{

using nlohmann::json;

void StageReport::merge(const StageReport & other)
{
  processed += other.processed;
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
  std::sort(failures.begin(), failures.end());
  outputs.insert(outputs.end(), other.outputs.begin(), other.outputs.end());
  std::sort(outputs.begin(), outputs.end());
}

std::vector<fs::path> collect_scenario_files(const std::vector<std::string> & inputs)
{
  std::vector<fs::path> files;
  for (const auto & input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      for (const auto & entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          files.push_back(entry.path());
        }
      }
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw UsageError("no such scenario file or directory: " + input);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

std::string scenario_id(const fs::path & file) { return file.stem().string(); }

void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)> & fn)
{
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
    std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto & th : pool) {
      th.join();
    }
  }
  for (const auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

void write_resolved_config(const RunConfig & config, const fs::path & out_dir)
{
  fs::create_directories(out_dir);
  write_text_file(RunLayout{out_dir}.resolved_config(), resolved_config_text(config));
}

namespace
{

constexpr int kPlanSchemaVersion = 1;

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

/// Per-scenario slot filled by a worker; failures carry the message.
template <typename T>
struct Slot
{
  std::optional<T> value;
  std::string failure;
};

/// Runs `fn(file)` for every input on config.jobs threads, catching per-file errors.
template <typename T, typename Fn>
std::vector<Slot<T>> run_per_file(
  const RunConfig & config, const std::vector<fs::path> & inputs, Fn fn)
{
  std::vector<Slot<T>> slots(inputs.size());
  parallel_for(config.jobs, inputs.size(), [&](std::size_t i) {
    try {
      slots[i].value = fn(inputs[i]);
    } catch (const std::exception & e) {
      slots[i].failure = inputs[i].string() + ": " + e.what();
    }
  });
  return slots;
}

/// Ids must be unique across inputs since every output is named after them.
void check_unique_ids(const std::vector<fs::path> & inputs)
{
  std::set<std::string> seen;
  for (const auto & f : inputs) {
    if (!seen.insert(scenario_id(f)).second) {
      throw UsageError("duplicate scenario id: " + scenario_id(f));
    }
  }
}

template <typename T>
StageReport summarize(const std::vector<Slot<T>> & slots)
{
  StageReport report;
  report.processed = static_cast<int>(slots.size());
  for (const auto & s : slots) {
    if (!s.failure.empty()) {
      report.failures.push_back(s.failure);
    }
  }
  std::sort(report.failures.begin(), report.failures.end());
  return report;
}

json cost_to_json(const CostBreakdown & c)
{
  return {
    {"smooth", c.smooth}, {"reach", c.reach}, {"risk", c.risk}, {"collision", c.collision},
    {"total", c.total}};
}

template <typename T>
T get(const json & obj, const char * key, std::string_view context)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(std::string(context) + ": missing key " + key);
  }
  try {
    return it->get<T>();
  } catch (const json::exception &) {
    throw FormatError(std::string(context) + "." + key + ": wrong type");
  }
}

}  // namespace

std::string serialize_plans(const std::string & id, const std::vector<PlanRecord> & records)
{
  json plans = json::array();
  for (const auto & rec : records) {
    const auto & p = rec.result.profile;
    plans.push_back({
      {"planner", to_string(rec.kind)},
      {"error", rec.error},
      {"iterations", rec.result.iterations},
      {"path_offset", rec.path_offset},
      {"dt", p.dt},
      {"cost", cost_to_json(rec.result.cost)},
      {"v", p.v},
      {"s", p.s},
    });
  }
  const json doc{{"schema", kPlanSchemaVersion}, {"scenario", id}, {"plans", std::move(plans)}};
  return doc.dump(2) + "\n";
}

std::vector<PlanRecord> parse_plans(const std::string & text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception & e) {
    throw FormatError(std::string("plans: ") + e.what());
  }
  if (!doc.is_object()) {
    throw FormatError("plans: expected an object");
  }
  require_known_keys(doc, {"schema", "scenario", "plans"}, "plans");
  if (get<int>(doc, "schema", "plans") != kPlanSchemaVersion) {
    throw FormatError("plans: unsupported schema version");
  }
  std::vector<PlanRecord> out;
  for (const auto & p : get<json>(doc, "plans", "plans")) {
    require_known_keys(
      p, {"planner", "error", "iterations", "path_offset", "dt", "cost", "v", "s"}, "plan");
    PlanRecord rec;
    try {
      rec.kind = planner_kind_from_string(get<std::string>(p, "planner", "plan"));
    } catch (const UsageError & e) {
      throw FormatError(std::string("plan.planner: ") + e.what());
    }
    rec.error = get<std::string>(p, "error", "plan");
    rec.path_offset = get<double>(p, "path_offset", "plan");
    rec.result.kind = rec.kind;
    rec.result.iterations = get<int>(p, "iterations", "plan");
    const auto c = get<json>(p, "cost", "plan");
    require_known_keys(c, {"smooth", "reach", "risk", "collision", "total"}, "plan.cost");
    rec.result.cost.smooth = get<double>(c, "smooth", "plan.cost");
    rec.result.cost.reach = get<double>(c, "reach", "plan.cost");
    rec.result.cost.risk = get<double>(c, "risk", "plan.cost");
    rec.result.cost.collision = get<double>(c, "collision", "plan.cost");
    rec.result.cost.total = get<double>(c, "total", "plan.cost");
    rec.result.profile.dt = get<double>(p, "dt", "plan");
    rec.result.profile.v = get<std::vector<double>>(p, "v", "plan");
    rec.result.profile.s = get<std::vector<double>>(p, "s", "plan");
    if (rec.error.empty() && rec.result.profile.s.size() != rec.result.profile.v.size() + 1) {
      throw FormatError("plan: s must hold one more sample than v");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

fs::path plan_file(const fs::path & plans_dir, const std::string & id)
{
  return plans_dir / (id + ".json");
}

fs::path grid_file(const fs::path & grids_dir, const std::string & id)
{
  return grids_dir / (id + ".grid");
}

std::string format_generation_report(const std::vector<GenerationRow> & rows)
{
  std::string out =
    "scenario,phantom,seed,steps,interaction_weight,road_weight,step_scale,"
    "nominal_closest_approach,closest_approach,onroad_fraction\n";
  for (const auto & r : rows) {
    out += r.scenario + "," + r.phantom + "," + std::to_string(r.seed) + "," +
      std::to_string(r.steps) + "," + fmt(r.interaction_weight) + "," + fmt(r.road_weight) + "," +
      fmt(r.step_scale) + "," + fmt(r.nominal_closest_approach) + "," + fmt(r.closest_approach) +
      "," + fmt(r.onroad_fraction) + "\n";
  }
  return out;
}

std::string format_generation_metrics(const std::vector<GenerationMetricsRow> & rows)
{
  std::string out = "scenario,phantoms,ttc,onroad_rate,offroad_dist,interaction_agents\n";
  const auto line = [](const std::string & a, const std::string & b, double ttc, double on,
                      double off, double agents) {
    return a + "," + b + "," + fmt(ttc) + "," + fmt(on) + "," + fmt(off) + "," + fmt(agents) +
           "\n";
  };
  std::map<std::string, std::array<double, 5>> sums;
  std::vector<std::string> order;
  for (const auto & r : rows) {
    const auto & m = r.metrics;
    out += line(r.scenario, r.phantoms, m.ttc, m.onroad_rate, m.offroad_dist, m.interaction_agents);
    auto [it, inserted] = sums.try_emplace(r.phantoms, std::array<double, 5>{});
    if (inserted) {
      order.push_back(r.phantoms);
    }
    auto & s = it->second;
    s[0] += m.ttc;
    s[1] += m.onroad_rate;
    s[2] += m.offroad_dist;
    s[3] += m.interaction_agents;
    s[4] += 1.0;
  }
  for (const auto & name : order) {
    const auto & s = sums[name];
    out += line("mean", name, s[0] / s[4], s[1] / s[4], s[2] / s[4], s[3] / s[4]);
  }
  return out;
}

StageReport cmd_demo(const RunConfig & config, const fs::path & out)
{
  const RunLayout layout{out};
  fs::create_directories(layout.scenarios());
  const auto suite = make_demo_suite(config.seed, config.demo_count, config.planning.weights);
  StageReport report;
  for (const auto & d : suite) {
    ++report.processed;
    const auto violations = validate(d.scenario);
    if (!violations.empty()) {
      report.failures.push_back(
        d.id + ": " + violations.front().entity + " " + violations.front().rule);
      continue;
    }
    const fs::path file = layout.scenarios() / (d.id + ".json");
    write_scenario(file, d.scenario);
    report.outputs.push_back(file);
  }
  return report;
}

StageReport cmd_generate(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & out)
{
  check_unique_ids(inputs);
  const RunLayout layout{out};
  fs::create_directories(layout.augmented());
  struct Result
  {
    fs::path file;
    std::vector<GenerationRow> rows;
  };
  const auto slots = run_per_file<Result>(config, inputs, [&](const fs::path & in) {
    const std::string id = scenario_id(in);
    auto gen = generate_scenario(read_scenario(in), id, config);
    const fs::path file = layout.augmented() / (id + ".json");
    write_scenario(file, gen.scenario);
    return Result{file, std::move(gen.rows)};
  });
  StageReport report = summarize(slots);
  std::vector<GenerationRow> rows;
  for (const auto & s : slots) {
    if (s.value) {
      report.outputs.push_back(s.value->file);
      rows.insert(rows.end(), s.value->rows.begin(), s.value->rows.end());
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto & a, const auto & b) {
    return a.scenario < b.scenario;
  });
  std::sort(report.outputs.begin(), report.outputs.end());
  write_text_file(layout.generation_report(), format_generation_report(rows));
  return report;
}

StageReport cmd_risk(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & out)
{
  check_unique_ids(inputs);
  const RunLayout layout{out};
  fs::create_directories(layout.grids());
  const auto slots = run_per_file<fs::path>(config, inputs, [&](const fs::path & in) {
    const std::string id = scenario_id(in);
    const RiskGrid grid = build_scenario_risk(read_scenario(in), config);
    const fs::path file = grid_file(layout.grids(), id);
    write_grid(file.string(), grid);
    write_pgm((layout.grids() / (id + ".pgm")).string(), grid.spec, grid.total);
    return file;
  });
  StageReport report = summarize(slots);
  for (const auto & s : slots) {
    if (s.value) {
      report.outputs.push_back(*s.value);
    }
  }
  std::sort(report.outputs.begin(), report.outputs.end());
  return report;
}

StageReport cmd_plan(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & grids,
  const std::vector<PlannerKind> & planners, const fs::path & out)
{
  if (planners.empty()) {
    throw UsageError("planner list is empty");
  }
  check_unique_ids(inputs);
  const RunLayout layout{out};
  fs::create_directories(layout.plans());
  const auto slots = run_per_file<fs::path>(config, inputs, [&](const fs::path & in) {
    const std::string id = scenario_id(in);
    const Scenario scenario = read_scenario(in);
    const RiskGrid grid = read_grid(grid_file(grids, id).string());
    const auto records = plan_scenario(scenario, grid, planners, config);
    const fs::path file = plan_file(layout.plans(), id);
    write_text_file(file, serialize_plans(id, records));
    return file;
  });
  StageReport report = summarize(slots);
  for (const auto & s : slots) {
    if (s.value) {
      report.outputs.push_back(*s.value);
    }
  }
  std::sort(report.outputs.begin(), report.outputs.end());
  return report;
}

StageReport cmd_eval(
  const RunConfig & config, const std::vector<fs::path> & inputs, const fs::path & grids,
  const fs::path & plans, const fs::path & out)
{
  check_unique_ids(inputs);
  const RunLayout layout{out};
  fs::create_directories(layout.root);
  struct Result
  {
    std::vector<EvalRow> rows;
    std::vector<GenerationMetricsRow> generation;
    std::string missing;
  };
  const auto slots = run_per_file<Result>(config, inputs, [&](const fs::path & in) {
    const std::string id = scenario_id(in);
    Result r;
    const fs::path pf = plan_file(plans, id);
    if (!fs::exists(pf)) {
      EvalRow row;
      row.scenario = id;
      row.error = "missing plan file";
      r.rows.push_back(row);
      r.missing = pf.string();
      return r;
    }
    const Scenario scenario = read_scenario(in);
    const auto records = parse_plans(read_text_file(pf));
    const fs::path gf = grid_file(grids, id);
    std::optional<RiskGrid> grid;
    if (fs::exists(gf)) {
      grid = read_grid(gf.string());
    } else {
      r.missing = gf.string();
    }
    for (const auto & rec : records) {
      if (grid) {
        r.rows.push_back(evaluate_plan(id, scenario, *grid, rec, config));
      } else {
        EvalRow row;
        row.scenario = id;
        row.planner = to_string(rec.kind);
        row.error = "missing grid file";
        r.rows.push_back(row);
      }
    }
    r.generation.push_back({id, "guided", scenario_generation_metrics(scenario, config)});
    r.generation.push_back(
      {id, "constant_velocity",
       scenario_generation_metrics(constant_velocity_phantoms(scenario), config)});
    return r;
  });
  StageReport report = summarize(slots);
  std::vector<EvalRow> rows;
  std::vector<GenerationMetricsRow> generation;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto & s = slots[i];
    if (!s.value) {
      EvalRow row;
      row.scenario = scenario_id(inputs[i]);
      row.error = "evaluation failed";
      rows.push_back(row);
      continue;
    }
    if (!s.value->missing.empty()) {
      report.failures.push_back(inputs[i].string() + ": missing " + s.value->missing);
    }
    rows.insert(rows.end(), s.value->rows.begin(), s.value->rows.end());
    generation.insert(generation.end(), s.value->generation.begin(), s.value->generation.end());
  }
  std::sort(report.failures.begin(), report.failures.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto & a, const auto & b) {
    return a.scenario < b.scenario;
  });
  std::stable_sort(generation.begin(), generation.end(), [](const auto & a, const auto & b) {
    return a.scenario < b.scenario;
  });
  write_text_file(layout.eval_report(), format_eval_report(rows));
  write_text_file(layout.generation_metrics(), format_generation_metrics(generation));
  report.outputs = {layout.eval_report(), layout.generation_metrics()};
  return report;
}

StageReport cmd_plot(
  const RunConfig & config, const fs::path & run, const std::vector<std::string> & ids,
  const std::vector<FigureKind> & kinds)
{
  const RunLayout layout{run};
  fs::create_directories(layout.figures());
  std::vector<fs::path> items;
  for (const auto & id : ids) {
    items.emplace_back(id);
  }
  const auto slots = run_per_file<std::vector<fs::path>>(config, items, [&](const fs::path & item) {
    const std::string id = item.string();
    std::vector<fs::path> written;
    for (const auto kind : kinds) {
      if (kind == FigureKind::heatmap) {
        const Scenario scenario = read_scenario(layout.augmented() / (id + ".json"));
        const RiskGrid grid = read_grid(grid_file(layout.grids(), id).string());
        HeatmapOptions opt;
        opt.ray_count = config.visibility.ray_count;
        opt.max_range = config.visibility.max_range;
        const fs::path file = layout.figures() / (id + "_heatmap.ppm");
        write_ppm(file, render_heatmap(scenario, grid, opt));
        written.push_back(file);
      } else {
        const auto records = parse_plans(read_text_file(plan_file(layout.plans(), id)));
        const fs::path file = layout.figures() / (id + "_profile.ppm");
        write_ppm(file, render_profile(records));
        written.push_back(file);
      }
    }
    return written;
  });
  StageReport report = summarize(slots);
  for (const auto & s : slots) {
    if (s.value) {
      report.outputs.insert(report.outputs.end(), s.value->begin(), s.value->end());
    }
  }
  std::sort(report.outputs.begin(), report.outputs.end());
  return report;
}

StageReport cmd_pipeline(const RunConfig & config, const fs::path & out)
{
  const RunLayout layout{out};
  write_resolved_config(config, out);
  StageReport report;
  std::vector<fs::path> inputs;
  if (config.scenarios.empty()) {
    const auto demo = cmd_demo(config, out);
    report.merge(demo);
    inputs = demo.outputs;
  } else {
    inputs = collect_scenario_files(config.scenarios);
  }
  const auto generated = cmd_generate(config, inputs, out);
  const auto risk = cmd_risk(config, generated.outputs, out);
  std::vector<fs::path> plannable;
  for (const auto & f : generated.outputs) {
    if (fs::exists(grid_file(layout.grids(), scenario_id(f)))) {
      plannable.push_back(f);
    }
  }
  const auto planned = cmd_plan(config, plannable, layout.grids(), config.planning.planners, out);
  const auto evaluated = cmd_eval(config, generated.outputs, layout.grids(), layout.plans(), out);

  std::vector<std::string> ids;
  for (const auto & f : planned.outputs) {
    ids.push_back(scenario_id(f));
  }
  ids.resize(std::min(ids.size(), static_cast<std::size_t>(config.figures)));
  const auto plotted = cmd_plot(config, out, ids, {FigureKind::heatmap, FigureKind::profile});

  for (const auto * stage : {&generated, &risk, &planned, &evaluated, &plotted}) {
    report.failures.insert(report.failures.end(), stage->failures.begin(), stage->failures.end());
  }
  report.processed = static_cast<int>(inputs.size());
  report.outputs = evaluated.outputs;
  return report;
}

}  // namespace occrisk
