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
#include <cmath>
#include <limits>
#include <numbers>

#include "occrisk/errors.hpp"
#include "occrisk/rng.hpp"
#include "occrisk/scenario_io.hpp"
#include "occrisk/scene.hpp"
#include "support.hpp"

namespace occrisk
{
namespace
{

using testing::constant_agent;
using testing::straight_lane;
using testing::straight_scene;

Polyline random_path(CounterRng & rng, int points)
{
  std::vector<Vec2> pts{{0.0, 0.0}};
  double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  for (int i = 1; i < points; ++i) {
    heading += rng.uniform(-1.2, 1.2);
    pts.push_back(pts.back() + unit_from_angle(heading) * rng.uniform(4.0, 15.0));
  }
  return Polyline(pts);
}

/// Arc length of the nearest sample when the path is walked at `step`.
double dense_argmin(const Polyline & path, const Vec2 & p, double step)
{
  double best_s = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  for (double s = 0.0; s <= path.length(); s += step) {
    const double d = distance(path.point_at(s), p);
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  return best_s;
}

TEST(ProjectToPath, ExamplePoints)
{
  const Polyline path({{0.0, 0.0}, {10.0, 0.0}});
  const auto start = project_to_path({0.0, 0.0}, path);
  EXPECT_DOUBLE_EQ(start.s, 0.0);
  EXPECT_DOUBLE_EQ(start.lateral, 0.0);
  const auto mid = project_to_path({5.0, 2.0}, path);
  EXPECT_NEAR(mid.s, 5.0, 1e-12);
  EXPECT_NEAR(mid.lateral, 2.0, 1e-12);
  const auto right = project_to_path({5.0, -2.0}, path);
  EXPECT_NEAR(right.lateral, -2.0, 1e-12);
}

TEST(ProjectToPath, ClampsBeyondEndpoints)
{
  const Polyline path({{0.0, 0.0}, {10.0, 0.0}});
  EXPECT_DOUBLE_EQ(project_to_path({-3.0, 1.0}, path).s, 0.0);
  EXPECT_DOUBLE_EQ(project_to_path({14.0, -1.0}, path).s, 10.0);
}

TEST(ProjectToPath, MatchesDenseSampling)
{
  CounterRng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Polyline path = random_path(rng, 4);
    const Vec2 p{rng.uniform(-20.0, 40.0), rng.uniform(-20.0, 40.0)};
    const double oracle = dense_argmin(path, p, 1e-3);
    EXPECT_NEAR(project_to_path(p, path).s, oracle, 2e-3) << "trial " << trial;
  }
}

TEST(ProjectToPath, Idempotent)
{
  CounterRng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Polyline path = random_path(rng, 5);
    const Vec2 p{rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)};
    const auto a = project_to_path(p, path);
    const auto b = project_to_path(path.point_at(a.s), path);
    EXPECT_NEAR(b.s, a.s, 1e-9);
    EXPECT_NEAR(b.lateral, 0.0, 1e-9);
  }
}

TEST(RoadSdf, ExamplePoints)
{
  const std::vector<LaneSegment> lanes{straight_lane("a", {0.0, 0.0}, {50.0, 0.0}, 4.0)};
  EXPECT_DOUBLE_EQ(road_sdf({20.0, 0.0}, lanes), 0.0);
  EXPECT_DOUBLE_EQ(road_sdf({20.0, 1.9}, lanes), 0.0);
  EXPECT_NEAR(road_sdf({20.0, 3.0}, lanes), 1.0, 1e-12);
  EXPECT_NEAR(road_sdf({20.0, -3.0}, lanes), 1.0, 1e-12);
  // Round cap beyond the end.
  EXPECT_NEAR(road_sdf({53.0, 4.0}, lanes), 5.0 - 2.0, 1e-12);
}

std::vector<LaneSegment> random_lanes(CounterRng & rng)
{
  std::vector<LaneSegment> lanes;
  for (int k = 0; k < 3; ++k) {
    LaneSegment lane;
    lane.id = "l" + std::to_string(k);
    Polyline path = random_path(rng, 3);
    std::vector<Vec2> pts;
    const Vec2 shift{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    for (const auto & p : path.points()) {
      pts.push_back(p + shift);
    }
    lane.centerline = Polyline(pts);
    lane.width = rng.uniform(2.5, 4.5);
    lanes.push_back(lane);
  }
  return lanes;
}

/// Corridor boundaries sampled densely: offset lines per segment and cap circles per vertex.
std::vector<Vec2> dense_boundary(const std::vector<LaneSegment> & lanes)
{
  std::vector<Vec2> out;
  for (const auto & lane : lanes) {
    const auto & pts = lane.centerline.points();
    const double r = 0.5 * lane.width;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Vec2 d = pts[i + 1] - pts[i];
      const double len = norm(d);
      const Vec2 n = Vec2{-d.y, d.x} * (1.0 / len);
      for (double u = 0.0; u <= len; u += 2e-3) {
        const Vec2 c = pts[i] + d * (u / len);
        out.push_back(c + n * r);
        out.push_back(c - n * r);
      }
    }
    for (const auto & c : pts) {
      for (int a = 0; a < 7200; ++a) {
        out.push_back(c + unit_from_angle(a * std::numbers::pi / 3600.0) * r);
      }
    }
  }
  return out;
}

TEST(RoadSdf, MatchesDenseBoundary)
{
  CounterRng rng(21);
  const auto lanes = random_lanes(rng);
  const auto boundary = dense_boundary(lanes);
  int outside = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Vec2 p{rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)};
    const double sdf = road_sdf(p, lanes);
    if (sdf == 0.0) {
      continue;
    }
    ++outside;
    double oracle = std::numeric_limits<double>::infinity();
    for (const auto & b : boundary) {
      oracle = std::min(oracle, distance(p, b));
    }
    EXPECT_NEAR(sdf, oracle, 1e-2) << "point " << p.x << "," << p.y;
  }
  EXPECT_GT(outside, 20);
}

TEST(RoadSdf, OneLipschitz)
{
  CounterRng rng(22);
  const auto lanes = random_lanes(rng);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec2 p{rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)};
    const Vec2 q = p + Vec2{rng.normal(), rng.normal()} * rng.uniform(0.0, 10.0);
    EXPECT_LE(std::abs(road_sdf(p, lanes) - road_sdf(q, lanes)), distance(p, q) + 1e-12);
  }
}

TEST(RoadSdf, GradientIsUnitOutsideAndZeroInside)
{
  const std::vector<LaneSegment> lanes{straight_lane("a", {0.0, 0.0}, {50.0, 0.0}, 4.0)};
  const auto out = road_sdf_with_gradient({10.0, 5.0}, lanes);
  EXPECT_NEAR(out.value, 3.0, 1e-12);
  EXPECT_NEAR(out.gradient.x, 0.0, 1e-12);
  EXPECT_NEAR(out.gradient.y, 1.0, 1e-12);
  const auto in = road_sdf_with_gradient({10.0, 0.5}, lanes);
  EXPECT_EQ(in.value, 0.0);
  EXPECT_EQ(in.gradient, (Vec2{0.0, 0.0}));
}

Scenario well_formed()
{
  Scenario sc = straight_scene();
  sc.lanes.front().successors = {"exit"};
  sc.lanes.push_back(straight_lane("exit", {200.0, 0.0}, {260.0, 0.0}));
  sc.lanes.back().predecessors = {"ego_lane"};
  sc.agents.push_back(constant_agent("car", {30.0, 3.5, std::numbers::pi, 8.0}, sc.dt, sc.steps()));
  sc.occluders.push_back({{10.0, 5.0}, {14.0, 5.0}, {14.0, 9.0}, {10.0, 9.0}});
  return sc;
}

TEST(Validate, WellFormedScenarioHasNoViolations)
{
  EXPECT_TRUE(validate(well_formed()).empty());
}

TEST(Validate, DecreasingTimestampsNameTheAgent)
{
  Scenario sc = well_formed();
  std::swap(sc.agents[0].states[3].t, sc.agents[0].states[4].t);
  const auto v = validate(sc);
  ASSERT_FALSE(v.empty());
  for (const auto & violation : v) {
    EXPECT_EQ(violation.entity, "agent car");
  }
}

TEST(Validate, MissingSuccessorNamesTheLane)
{
  Scenario sc = well_formed();
  sc.lanes[0].successors.push_back("nowhere");
  const auto v = validate(sc);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].entity.find("ego_lane"), std::string::npos);
  EXPECT_NE(v[0].rule.find("nowhere"), std::string::npos);
}

TEST(Validate, OtherRules)
{
  Scenario sc = well_formed();
  sc.agents.push_back(sc.agents[0]);
  sc.lanes[1].width = 0.0;
  sc.ego.initial.x = 3.0;
  sc.occluders.push_back({{0.0, 0.0}, {1.0, 0.0}});
  sc.agents[0].states[2].speed = -1.0;
  EXPECT_GE(validate(sc).size(), 5u);
}

TEST(Scene, FootprintRadiusAndLookups)
{
  EXPECT_NEAR(footprint_radius({2.4, 1.0}), std::sqrt(2.4), 1e-15);
  const Scenario sc = well_formed();
  EXPECT_EQ(sc.steps(), 80);
  ASSERT_NE(sc.find_lane("exit"), nullptr);
  EXPECT_EQ(sc.find_lane("none"), nullptr);
  ASSERT_NE(sc.find_agent("car"), nullptr);
  EXPECT_DOUBLE_EQ(sc.find_agent("car")->state_near(0.42, sc.dt).t, 0.4);
  EXPECT_DOUBLE_EQ(sc.find_agent("car")->state_near(99.0, sc.dt).t, 8.0);
}

TEST(Scene, EgoLogFallsBackToConstantSpeedAlongPath)
{
  const Scenario sc = straight_scene(10.0);
  const auto states = ego_log_states(sc);
  ASSERT_EQ(states.size(), 81u);
  EXPECT_NEAR(states[80].x, 80.0, 1e-9);
  EXPECT_NEAR(states[80].speed, 10.0, 1e-12);
}

TEST(ScenarioIo, RoundTripIsByteExact)
{
  CounterRng rng(5);
  Scenario sc = well_formed();
  for (auto & s : sc.agents[0].states) {
    s.x += rng.normal() * 1e-3;
    s.heading = rng.uniform(-3.0, 3.0);
  }
  sc.metadata["note"] = "x";
  const std::string a = serialize_scenario(sc);
  const std::string b = serialize_scenario(parse_scenario(a));
  EXPECT_EQ(a, b);
  const Scenario back = parse_scenario(a);
  EXPECT_EQ(back.agents[0].states[7].x, sc.agents[0].states[7].x);
  EXPECT_EQ(back.agents[0].states[7].heading, sc.agents[0].states[7].heading);
}

TEST(ScenarioIo, RejectsUnknownKeysAndBadSchema)
{
  auto doc = scenario_to_json(well_formed());
  doc["surprise"] = 1;
  EXPECT_THROW(scenario_from_json(doc), FormatError);
  doc = scenario_to_json(well_formed());
  doc["schema"] = 99;
  EXPECT_THROW(scenario_from_json(doc), FormatError);
  doc = scenario_to_json(well_formed());
  doc["lanes"][0]["colour"] = "red";
  EXPECT_THROW(scenario_from_json(doc), FormatError);
  EXPECT_THROW(parse_scenario("{not json"), FormatError);
}

}  // namespace
}  // namespace occrisk
