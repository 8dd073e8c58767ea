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

#include <filesystem>

#include "occrisk/config.hpp"
#include "occrisk/errors.hpp"
#include "occrisk/scenario_io.hpp"

namespace occrisk
{
namespace
{

using nlohmann::json;

TEST(Config, DefaultsRoundTrip)
{
  const RunConfig defaults;
  const json doc = config_to_json(defaults);
  EXPECT_EQ(config_to_json(config_from_json(doc)), doc);
  EXPECT_EQ(config_to_json(config_from_json(json::object())), doc);
  EXPECT_EQ(json::parse(resolved_config_text(defaults)), doc);
}

TEST(Config, OverlayKeepsOtherDefaults)
{
  const json doc = json::parse(R"({
    "seed": 9,
    "risk": {"decay": 1.5, "collision_ego": "noap"},
    "planning": {"planners": ["srq", "noap"], "w3": 7.0}
  })");
  const RunConfig c = config_from_json(doc);
  EXPECT_EQ(c.seed, 9U);
  EXPECT_EQ(c.risk.decay, 1.5);
  EXPECT_EQ(c.risk.alpha, RiskParams{}.alpha);
  EXPECT_EQ(c.collision_ego, CollisionEgo::noap);
  EXPECT_EQ(c.planning.planners, (std::vector<PlannerKind>{PlannerKind::srq, PlannerKind::noap}));
  EXPECT_EQ(c.planning.weights.w3, 7.0);
  EXPECT_EQ(c.planning.weights.w4, PlannerWeights{}.w4);
  EXPECT_EQ(c.demo_count, RunConfig{}.demo_count);
}

TEST(Config, RejectsUnknownKeysAtEveryLevel)
{
  EXPECT_THROW(config_from_json(json::parse(R"({"sed": 1})")), FormatError);
  EXPECT_THROW(config_from_json(json::parse(R"({"risk": {"decay": 1, "sigma": 2}})")), FormatError);
  EXPECT_THROW(
    config_from_json(json::parse(R"({"planning": {"planners": ["noap"], "w5": 1}})")), FormatError);
  try {
    config_from_json(json::parse(R"({"visibility": {"rays": 10}})"));
    FAIL() << "accepted an unknown key";
  } catch (const FormatError & e) {
    EXPECT_NE(std::string(e.what()).find("rays"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsWrongTypesAndBadValues)
{
  EXPECT_THROW(config_from_json(json::parse(R"({"seed": "seven"})")), FormatError);
  EXPECT_THROW(config_from_json(json::parse(R"({"risk": 3})")), FormatError);
  EXPECT_THROW(config_from_json(json::parse(R"([1, 2])")), FormatError);
  EXPECT_THROW(config_from_json(json::parse(R"({"jobs": 0})")), FormatError);
  EXPECT_THROW(config_from_json(json::parse(R"({"figures": -1})")), FormatError);
  EXPECT_THROW(config_from_json(json::parse(R"({"planning": {"w2": -0.1}})")), FormatError);
  EXPECT_THROW(
    config_from_json(json::parse(R"({"planning": {"planners": ["fastest"]}})")), FormatError);
  EXPECT_THROW(
    config_from_json(json::parse(R"({"risk": {"collision_ego": "replay"}})")), FormatError);
  EXPECT_THROW(
    config_from_json(json::parse(R"({"phantom": {"speed_min": 20, "speed_max": 10}})")),
    FormatError);
}

TEST(Config, LoadFromFile)
{
  const auto dir = std::filesystem::temp_directory_path() / "occrisk_config_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "run.json", R"({"seed": 3, "jobs": 2})");
  const RunConfig c = load_config((dir / "run.json").string());
  EXPECT_EQ(c.seed, 3U);
  EXPECT_EQ(c.jobs, 2);
  write_text_file(dir / "bad.json", "{ seed: 3 ");
  EXPECT_THROW(load_config((dir / "bad.json").string()), FormatError);
  EXPECT_THROW(load_config((dir / "missing.json").string()), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace occrisk
