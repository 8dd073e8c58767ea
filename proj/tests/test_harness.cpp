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
#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>

#include "occrisk/errors.hpp"
#include "occrisk/harness.hpp"
#include "occrisk/scenario_io.hpp"
#include "support.hpp"

namespace occrisk
{
namespace
{

/// Fresh scratch directory per test, removed afterwards.
class HarnessTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("occrisk_harness_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Small but complete configuration: two demo scenarios, a short reverse chain.
  static RunConfig quick_config()
  {
    RunConfig c;
    c.demo_count = 2;
    c.diffusion.steps = 10;
    c.prediction.multimodal.modes = 3;
    c.planning.solver.start_levels = 3;
    return c;
  }

  fs::path dir_;
};

std::vector<std::string> lines_of(const std::string & text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

/// Relative path -> bytes of every regular file below root.
std::map<std::string, std::string> tree(const fs::path & root)
{
  std::map<std::string, std::string> out;
  for (const auto & e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).string()] = read_text_file(e.path());
    }
  }
  return out;
}

Scenario open_road()
{
  Scenario sc = testing::straight_scene(8.0);
  sc.ego.d_desired = 60.0;
  return sc;
}

TEST_F(HarnessTest, CollectScenarioFiles)
{
  fs::create_directories(dir_ / "a");
  write_text_file(dir_ / "a" / "z.json", "{}");
  write_text_file(dir_ / "a" / "b.json", "{}");
  write_text_file(dir_ / "a" / "notes.txt", "");
  write_text_file(dir_ / "c.json", "{}");
  const auto files = collect_scenario_files(
    {(dir_ / "c.json").string(), (dir_ / "a").string(), (dir_ / "a" / "b.json").string()});
  ASSERT_EQ(files.size(), 3U);
  EXPECT_TRUE(std::is_sorted(files.begin(), files.end()));
  EXPECT_EQ(scenario_id(files.front()), "b");
  EXPECT_THROW(collect_scenario_files({(dir_ / "nope").string()}), UsageError);
}

TEST_F(HarnessTest, ParallelForCoversAllIndicesAndRethrows)
{
  std::vector<std::atomic<int>> hits(100);
  parallel_for(4, hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto & h : hits) {
    EXPECT_EQ(h.load(), 1);
  }
  EXPECT_THROW(
    parallel_for(3, 10, [](std::size_t i) {
      if (i == 7) {
        throw Infeasible("boom");
      }
    }),
    Infeasible);
}

TEST_F(HarnessTest, PlanFileRoundTripAndStrictParsing)
{
  PlanRecord ok;
  ok.kind = PlannerKind::srq;
  ok.result.profile = VelocityProfile::from_speeds({3.0, 3.5, 4.0}, 0.1);
  ok.result.cost = {1.0, 2.0, 0.0, 0.5, 3.5};
  ok.result.iterations = 4;
  ok.path_offset = 1.25;
  PlanRecord failed;
  failed.kind = PlannerKind::risk_aware;
  failed.error = "Infeasible: no profile";
  const std::string text = serialize_plans("demo_000", {ok, failed});
  const auto back = parse_plans(text);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[0].kind, PlannerKind::srq);
  EXPECT_EQ(back[0].result.profile.v, ok.result.profile.v);
  EXPECT_EQ(back[0].result.profile.s, ok.result.profile.s);
  EXPECT_EQ(back[0].result.iterations, 4);
  EXPECT_EQ(back[0].path_offset, 1.25);
  EXPECT_EQ(back[0].result.cost.total, 3.5);
  EXPECT_EQ(back[1].error, failed.error);
  EXPECT_EQ(serialize_plans("demo_000", back), text);

  auto doc = nlohmann::json::parse(text);
  doc["plans"][0]["extra"] = 1;
  EXPECT_THROW(parse_plans(doc.dump()), FormatError);
  doc = nlohmann::json::parse(text);
  doc["plans"][0]["s"].erase(0);
  EXPECT_THROW(parse_plans(doc.dump()), FormatError);
  EXPECT_THROW(parse_plans("not json"), FormatError);
}

TEST_F(HarnessTest, GenerateWithoutOcclusionCopiesInput)
{
  const Scenario sc = open_road();
  const auto in = dir_ / "open.json";
  write_scenario(in, sc);
  const auto report = cmd_generate(quick_config(), {in}, dir_ / "run");
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.processed, 1);
  const RunLayout layout{dir_ / "run"};
  EXPECT_EQ(read_text_file(layout.augmented() / "open.json"), serialize_scenario(sc));
  EXPECT_EQ(lines_of(read_text_file(layout.generation_report())).size(), 1U);
}

TEST_F(HarnessTest, GenerateRejectsDuplicateIdsAndReportsBadFiles)
{
  write_scenario(dir_ / "x.json", open_road());
  fs::create_directories(dir_ / "other");
  write_scenario(dir_ / "other" / "x.json", open_road());
  EXPECT_THROW(
    cmd_generate(quick_config(), {dir_ / "x.json", dir_ / "other" / "x.json"}, dir_ / "run"),
    UsageError);

  write_text_file(dir_ / "broken.json", "{\"schema\": 1}");
  const auto report =
    cmd_generate(quick_config(), {dir_ / "broken.json", dir_ / "x.json"}, dir_ / "run");
  EXPECT_FALSE(report.ok());
  ASSERT_EQ(report.failures.size(), 1U);
  EXPECT_NE(report.failures.front().find("broken"), std::string::npos);
  EXPECT_EQ(report.outputs.size(), 1U);
}

TEST_F(HarnessTest, RiskGridFileMatchesInProcessBuild)
{
  const RunConfig config = quick_config();
  ASSERT_TRUE(cmd_demo(config, dir_).ok());
  const auto inputs = collect_scenario_files({RunLayout{dir_}.scenarios().string()});
  ASSERT_EQ(inputs.size(), 2U);
  ASSERT_TRUE(cmd_generate(config, inputs, dir_).ok());
  const auto augmented = collect_scenario_files({RunLayout{dir_}.augmented().string()});
  const auto report = cmd_risk(config, augmented, dir_);
  ASSERT_TRUE(report.ok());
  ASSERT_EQ(report.outputs.size(), 2U);
  for (const auto & in : augmented) {
    const RiskGrid direct = build_scenario_risk(read_scenario(in), config);
    const RiskGrid back = read_grid(grid_file(RunLayout{dir_}.grids(), scenario_id(in)).string());
    ASSERT_EQ(back.total.size(), direct.total.size());
    EXPECT_EQ(back.spec.n1, direct.spec.n1);
    EXPECT_EQ(back.spec.origin.x, direct.spec.origin.x);
    double worst = 0.0;
    for (std::size_t k = 0; k < direct.total.size(); ++k) {
      ASSERT_EQ(back.total[k], static_cast<double>(static_cast<float>(direct.total[k])));
      worst = std::max(worst, std::abs(back.total[k] - direct.total[k]));
    }
    EXPECT_LT(worst, 1e-7);
    EXPECT_TRUE(fs::exists(RunLayout{dir_}.grids() / (scenario_id(in) + ".pgm")));
  }
}

TEST_F(HarnessTest, EmptyAgentScenarioGivesZeroGrid)
{
  write_scenario(dir_ / "empty.json", open_road());
  ASSERT_TRUE(cmd_risk(quick_config(), {dir_ / "empty.json"}, dir_).ok());
  const RiskGrid g = read_grid(grid_file(RunLayout{dir_}.grids(), "empty").string());
  EXPECT_TRUE(std::all_of(g.total.begin(), g.total.end(), [](double v) { return v == 0.0; }));
}

TEST_F(HarnessTest, PlanRequiresPlanners)
{
  write_scenario(dir_ / "open.json", open_road());
  EXPECT_THROW(cmd_plan(quick_config(), {dir_ / "open.json"}, dir_, {}, dir_), UsageError);
}

TEST_F(HarnessTest, EvalRowsFooterAndMissingArtifacts)
{
  const RunConfig config = quick_config();
  write_scenario(dir_ / "open.json", open_road());
  const std::vector<fs::path> inputs{dir_ / "open.json"};
  const RunLayout layout{dir_};
  ASSERT_TRUE(cmd_generate(config, inputs, dir_).ok());
  ASSERT_TRUE(cmd_risk(config, inputs, dir_).ok());
  ASSERT_TRUE(
    cmd_plan(config, inputs, layout.grids(), {PlannerKind::noap, PlannerKind::srq}, dir_).ok());
  ASSERT_TRUE(cmd_eval(config, inputs, layout.grids(), layout.plans(), dir_).ok());
  auto rows = lines_of(read_text_file(layout.eval_report()));
  ASSERT_EQ(rows.size(), 4U);
  EXPECT_EQ(rows[1].rfind("open,noap,", 0), 0U);
  EXPECT_EQ(rows[2].rfind("open,srq,", 0), 0U);
  EXPECT_EQ(rows[3].rfind("mean,all,", 0), 0U);
  // With nothing hidden SRQ and NOAP drive the same profile, so the footer equals each row.
  const auto numbers = [](const std::string & r) {
    std::vector<double> out;
    std::istringstream in(r.substr(r.find(',', r.find(',') + 1) + 1));
    for (std::string cell; std::getline(in, cell, ',');) {
      if (!cell.empty()) {
        out.push_back(std::stod(cell));
      }
    }
    return out;
  };
  EXPECT_EQ(numbers(rows[1]).size(), 7U);
  EXPECT_EQ(numbers(rows[1]), numbers(rows[2]));
  EXPECT_EQ(numbers(rows[3]), numbers(rows[1]));

  const auto gm = lines_of(read_text_file(layout.generation_metrics()));
  ASSERT_EQ(gm.size(), 5U);
  EXPECT_EQ(gm[0], "scenario,phantoms,ttc,onroad_rate,offroad_dist,interaction_agents");
  EXPECT_EQ(gm[1].rfind("open,guided,", 0), 0U);
  EXPECT_EQ(gm[2].rfind("open,constant_velocity,", 0), 0U);
  EXPECT_EQ(gm[3].rfind("mean,guided,", 0), 0U);
  EXPECT_EQ(gm[4].rfind("mean,constant_velocity,", 0), 0U);

  fs::remove(plan_file(layout.plans(), "open"));
  auto report = cmd_eval(config, inputs, layout.grids(), layout.plans(), dir_);
  EXPECT_FALSE(report.ok());
  rows = lines_of(read_text_file(layout.eval_report()));
  ASSERT_GE(rows.size(), 3U);
  EXPECT_NE(rows[1].find("missing"), std::string::npos) << rows[1];

  ASSERT_TRUE(
    cmd_plan(config, inputs, layout.grids(), {PlannerKind::noap, PlannerKind::srq}, dir_).ok());
  fs::remove(grid_file(layout.grids(), "open"));
  report = cmd_eval(config, inputs, layout.grids(), layout.plans(), dir_);
  EXPECT_FALSE(report.ok());
  rows = lines_of(read_text_file(layout.eval_report()));
  ASSERT_EQ(rows.size(), 4U);
  EXPECT_EQ(rows[1].rfind("open,noap,,", 0), 0U) << rows[1];
  EXPECT_EQ(rows[2].rfind("open,srq,,", 0), 0U) << rows[2];
}

TEST_F(HarnessTest, PipelineIsDeterministic)
{
  RunConfig config = quick_config();
  config.seed = 7;
  config.planning.planners = {PlannerKind::risk_aware, PlannerKind::noap};
  const auto a = cmd_pipeline(config, dir_ / "a");
  const auto b = cmd_pipeline(config, dir_ / "b");
  EXPECT_TRUE(a.ok());
  EXPECT_TRUE(b.ok());
  const auto ta = tree(dir_ / "a");
  const auto tb = tree(dir_ / "b");
  EXPECT_EQ(ta.size(), tb.size());
  for (const auto & [name, bytes] : ta) {
    ASSERT_TRUE(tb.count(name)) << name;
    EXPECT_TRUE(bytes == tb.at(name)) << name;
  }
  EXPECT_TRUE(ta.count("config.resolved"));
  EXPECT_TRUE(ta.count("eval_report.csv"));
  EXPECT_TRUE(ta.count("figures/demo_000_heatmap.ppm"));
  EXPECT_TRUE(ta.count("figures/demo_000_profile.ppm"));
  EXPECT_FALSE(ta.count("figures/demo_001_heatmap.ppm"));
  EXPECT_TRUE(ta.count("plans/demo_001.json"));
}

TEST_F(HarnessTest, JobCountDoesNotChangeOutputs)
{
  RunConfig config = quick_config();
  config.planning.planners = {PlannerKind::noap};
  config.figures = 0;
  const auto one = cmd_pipeline(config, dir_ / "one");
  config.jobs = 3;
  const auto three = cmd_pipeline(config, dir_ / "three");
  ASSERT_TRUE(one.ok() && three.ok());
  auto ta = tree(dir_ / "one");
  auto tb = tree(dir_ / "three");
  // The resolved configuration records the job count itself.
  ta.erase("config.resolved");
  tb.erase("config.resolved");
  EXPECT_TRUE(ta == tb);
}

}  // namespace
}  // namespace occrisk
