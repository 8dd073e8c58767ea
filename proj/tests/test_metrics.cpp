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
#include <numbers>
#include <sstream>

#include "occrisk/metrics.hpp"
#include "occrisk/rng.hpp"
#include "support.hpp"

namespace occrisk
{
namespace
{

using testing::constant_agent;

TtcBody moving_body(const std::string & id, KinematicState s, double dt, int steps, double radius)
{
  TtcBody b{id, {}, radius};
  for (int i = 0; i <= steps; ++i) {
    const Vec2 p = s.position() + s.velocity() * (dt * i);
    b.states.push_back({p.x, p.y, s.heading, s.speed});
  }
  return b;
}

/// Independent TTC: smallest root of |dp + dv tau| = r, by the quadratic formula.
double ttc_oracle(const Vec2 & dp, const Vec2 & dv, double r, double cap)
{
  const double c = dp.x * dp.x + dp.y * dp.y - r * r;
  if (c <= 0.0) {
    return 0.0;
  }
  const double a = dv.x * dv.x + dv.y * dv.y;
  const double b = 2.0 * (dp.x * dv.x + dp.y * dv.y);
  const double disc = b * b - 4.0 * a * c;
  if (a == 0.0 || b >= 0.0 || disc < 0.0) {
    return cap;
  }
  return std::min(cap, (-b - std::sqrt(disc)) / (2.0 * a));
}

TtcMatrix matrix_of(std::vector<double> values, std::size_t steps, std::size_t agents)
{
  TtcMatrix m;
  m.steps = steps;
  m.agents = agents;
  m.values = std::move(values);
  return m;
}

TEST(Ttc, HeadOnClosedForm)
{
  // Gap 50 m, closing 10 m/s, combined radius 4 m.
  EXPECT_NEAR(time_to_collision({0, 0}, {6, 0}, {50, 0}, {-4, 0}, 4.0, 100.0), 4.6, 1e-12);
  const auto ego = moving_body("ego", {0, 0, 0, 6}, 0.1, 30, 2.0);
  const auto other = moving_body("car", {50, 0, std::numbers::pi, 4}, 0.1, 30, 2.0);
  const auto m = ttc_matrix(ego, {other}, 100.0);
  ASSERT_EQ(m.steps, 31U);
  ASSERT_EQ(m.agents, 1U);
  for (std::size_t t = 0; t < m.steps; ++t) {
    EXPECT_NEAR(m.at(t, 0), 4.6 - 0.1 * static_cast<double>(t), 1e-9);
  }
  EXPECT_NEAR(ttc_min(m), 4.6 - 3.0, 1e-9);
}

TEST(Ttc, OpeningRangeAndEgoAlone)
{
  const auto ego = moving_body("ego", {0, 0, 0, 5}, 0.1, 20, 1.5);
  const auto away = moving_body("car", {20, 0, 0, 9}, 0.1, 20, 1.5);
  const auto m = ttc_matrix(ego, {away}, 100.0);
  for (double v : m.values) {
    EXPECT_EQ(v, 100.0);
  }
  const auto alone = ttc_matrix(ego, {}, 100.0);
  EXPECT_EQ(ttc_min(alone), 100.0);
  EXPECT_EQ(ttc_avg(alone), 100.0);
  EXPECT_EQ(critical_moments(alone), 0);
}

TEST(Ttc, OverlapIsZero)
{
  EXPECT_EQ(time_to_collision({0, 0}, {1, 0}, {1, 0}, {0, 0}, 3.0, 100.0), 0.0);
}

TEST(Ttc, MatchesQuadraticOracle)
{
  CounterRng rng(21);
  for (int k = 0; k < 5000; ++k) {
    const Vec2 pe{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec2 pa{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec2 ve{rng.uniform(-15, 15), rng.uniform(-15, 15)};
    const Vec2 va{rng.uniform(-15, 15), rng.uniform(-15, 15)};
    const double r = rng.uniform(1.0, 5.0);
    EXPECT_NEAR(
      time_to_collision(pe, ve, pa, va, r, 100.0), ttc_oracle(pa - pe, va - ve, r, 100.0), 1e-9);
  }
}

TEST(TtcProperty, RigidTransformInvariant)
{
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double rot = rng.uniform(-3.1, 3.1);
    const Vec2 shift{rng.uniform(-1000, 1000), rng.uniform(-1000, 1000)};
    auto moved = [&](KinematicState s) {
      const double c = std::cos(rot);
      const double sn = std::sin(rot);
      return KinematicState{
        c * s.x - sn * s.y + shift.x, sn * s.x + c * s.y + shift.y, s.heading + rot, s.speed};
    };
    const KinematicState e{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-3, 3),
                           rng.uniform(0, 15)};
    const KinematicState a{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-3, 3),
                           rng.uniform(0, 15)};
    const auto m1 = ttc_matrix(
      moving_body("ego", e, 0.1, 20, 1.6), {moving_body("a", a, 0.1, 20, 1.6)}, 100.0);
    const auto m2 = ttc_matrix(
      moving_body("ego", moved(e), 0.1, 20, 1.6), {moving_body("a", moved(a), 0.1, 20, 1.6)},
      100.0);
    for (std::size_t k = 0; k < m1.values.size(); ++k) {
      EXPECT_NEAR(m1.values[k], m2.values[k], 1e-9);
    }
  }
}

TEST(TtcProperty, MinAtMostAvgAndAddingAgentsNeverRaisesMin)
{
  CounterRng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ego = moving_body("ego", {0, 0, 0, rng.uniform(0, 15)}, 0.1, 40, 1.6);
    std::vector<TtcBody> agents;
    double prev = 100.0;
    for (int k = 0; k < 5; ++k) {
      agents.push_back(moving_body(
        "a" + std::to_string(k),
        {rng.uniform(-60, 60), rng.uniform(-30, 30), rng.uniform(-3.1, 3.1), rng.uniform(0, 15)},
        0.1, 40, 1.6));
      const auto m = ttc_matrix(ego, agents, 100.0);
      EXPECT_LE(ttc_min(m), ttc_avg(m));
      EXPECT_LE(ttc_min(m), prev);
      EXPECT_GE(ttc_min(m), 0.0);
      EXPECT_LE(ttc_avg(m), 100.0);
      prev = ttc_min(m);
    }
  }
}

TEST(TtcReductions, ConstantSingleAndRandom)
{
  const auto c = matrix_of(std::vector<double>(12, 7.5), 4, 3);
  EXPECT_EQ(ttc_min(c), 7.5);
  EXPECT_EQ(ttc_avg(c), 7.5);
  std::vector<double> caps(12, 100.0);
  caps[7] = 4.6;
  EXPECT_EQ(ttc_min(matrix_of(caps, 4, 3)), 4.6);

  CounterRng rng(3);
  std::vector<double> v(60);
  for (auto & x : v) {
    x = rng.uniform(0.0, 100.0);
  }
  const auto m = matrix_of(v, 20, 3);
  EXPECT_EQ(ttc_min(m), *std::min_element(v.begin(), v.end()));
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  EXPECT_NEAR(ttc_avg(m), sum / 60.0, 1e-12);
  int crit = 0;
  for (std::size_t t = 0; t < 20; ++t) {
    crit += std::min({m.at(t, 0), m.at(t, 1), m.at(t, 2)}) < 3.0 ? 1 : 0;
  }
  EXPECT_EQ(critical_moments(m), crit);
}

TEST(CriticalMoments, CountAndStrictThreshold)
{
  EXPECT_EQ(critical_moments(matrix_of(std::vector<double>(20, 100.0), 10, 2)), 0);
  std::vector<double> v(20, 100.0);
  for (std::size_t t : {1U, 3U, 4U, 7U, 9U}) {
    v[t * 2 + (t % 2)] = 2.5;
  }
  v[2 * 2 + 1] = 3.0;
  v[5 * 2] = 3.0;
  EXPECT_EQ(critical_moments(matrix_of(v, 10, 2)), 5);
  EXPECT_EQ(critical_moments(matrix_of(std::vector<double>(4, 3.0), 4, 1), 3.0), 0);
  EXPECT_EQ(critical_moments(matrix_of(std::vector<double>(4, std::nextafter(3.0, 0.0)), 4, 1)), 4);
}

TEST(RiskScore, Examples)
{
  const std::vector<Vec2> pos(80, Vec2{1.0, 2.0});
  auto half = [](const Vec2 &) { return 0.5; };
  EXPECT_DOUBLE_EQ(risk_score(pos, std::vector<double>(80, 10.0), 0.1, half), 40.0);
  EXPECT_EQ(risk_score(pos, std::vector<double>(80, 0.0), 0.1, half), 0.0);
  auto zero = [](const Vec2 &) { return 0.0; };
  EXPECT_EQ(risk_score(pos, std::vector<double>(80, 10.0), 0.1, zero), 0.0);
}

TEST(RiskScore, GridOverloadUsesRiskAt)
{
  RiskGrid g;
  g.spec.origin = {0.0, 0.0};
  g.spec.resolution = 0.5;
  g.spec.n1 = 40;
  g.spec.n2 = 40;
  g.total.assign(g.spec.size(), 0.5);
  std::vector<Vec2> pos;
  for (int i = 0; i < 81; ++i) {
    pos.push_back({1.0 + 0.2 * i, 10.0});
  }
  EXPECT_DOUBLE_EQ(risk_score(pos, std::vector<double>(80, 10.0), 0.1, g), 40.0);
}

TEST(RiskScoreProperty, LinearInVelocityScale)
{
  CounterRng rng(17);
  std::vector<Vec2> pos;
  std::vector<double> v;
  for (int i = 0; i < 80; ++i) {
    pos.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    v.push_back(rng.uniform(0, 15));
  }
  auto field = [](const Vec2 & p) { return 0.5 + 0.4 * std::sin(p.x) * std::cos(p.y); };
  const double base = risk_score(pos, v, 0.1, field);
  for (double c : {0.0, 0.3, 2.0, 7.5}) {
    std::vector<double> scaled = v;
    for (auto & x : scaled) {
      x *= c;
    }
    EXPECT_NEAR(risk_score(pos, scaled, 0.1, field), c * base, 1e-9 * std::max(1.0, c * base));
  }
}

Scenario lane_following_scene()
{
  Scenario sc = testing::straight_scene(8.0);
  sc.agents.push_back(constant_agent("lead", {30.0, 0.0, 0.0, 8.0}, 0.1, 80));
  sc.agents.push_back(constant_agent("parked", {60.0, 0.0, 0.0, 0.0}, 0.1, 80));
  sc.agents.push_back(constant_agent("far", {80.0, 500.0, 0.0, 6.0}, 0.1, 80));
  AgentLog ego_log = constant_agent("ego", {0.0, 0.0, 0.0, 8.0}, 0.1, 80);
  sc.ego.log = ego_log.states;
  return sc;
}

TEST(GenerationMetrics, LogReplayIsFullyOnRoad)
{
  const Scenario sc = lane_following_scene();
  std::vector<Trajectory> logs;
  for (const auto & a : sc.agents) {
    if (a.id != "far") {
      logs.push_back(log_trajectory(a, sc.dt));
    }
  }
  const auto g = generation_metrics(sc, logs, logged_bodies(sc));
  EXPECT_EQ(g.onroad_rate, 1.0);
  EXPECT_EQ(g.offroad_dist, 0.0);
  // The parked car is below v_min and the far car beyond the interaction radius.
  EXPECT_EQ(g.interaction_agents, 1);
  // The logged ego runs into the parked car at 7.5 s; overlap counts as zero time to collision.
  EXPECT_EQ(g.ttc, 0.0);
}

TEST(GenerationMetrics, PhantomInsideCorridorAndOffRoadMean)
{
  const Scenario sc = lane_following_scene();
  Trajectory inside;
  inside.agent_id = "phantom_0_0";
  for (int i = 0; i <= 10; ++i) {
    inside.states.push_back({40.0 + i, 0.5, 0.0, 5.0});
  }
  auto g = generation_metrics(sc, {inside}, {});
  EXPECT_EQ(g.onroad_rate, 1.0);
  EXPECT_EQ(g.offroad_dist, 0.0);

  // Lane half-width 1.75: points at lateral 2.75 and 3.75 are 1 and 2 m off the road.
  Trajectory out;
  out.agent_id = "phantom_0_1";
  out.states = {{40.0, 0.0, 0.0, 5.0}, {41.0, 2.75, 0.0, 5.0}, {42.0, 3.75, 0.0, 5.0},
                {43.0, 0.0, 0.0, 5.0}};
  g = generation_metrics(sc, {out}, {});
  EXPECT_DOUBLE_EQ(g.onroad_rate, 0.5);
  EXPECT_NEAR(g.offroad_dist, 1.5, 1e-9);
}

TEST(EvalReport, RowsAndMeanFooter)
{
  EvalRow a{"s1", "noap", 2.0, 10.0, 4.0, 3, 1.0, 0.0, 2, ""};
  EvalRow b{"s1", "risk_aware", 4.0, 20.0, 1.0, 1, 0.5, 1.0, 4, ""};
  EvalRow c{"s2", "srq", 0, 0, 0, 0, 0, 0, 0, "Infeasible"};
  const std::string report = format_eval_report({a, b, c});
  std::istringstream in(report);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    lines.push_back(line);
  }
  ASSERT_EQ(lines.size(), 5U);
  EXPECT_EQ(
    lines[0],
    "scenario,planner,ttc_min,ttc_avg,risk_score,critical_moments,onroad_rate,offroad_dist,"
    "interaction_agents,error");
  EXPECT_EQ(lines[1].rfind("s1,noap,2.", 0), 0U);
  EXPECT_EQ(lines[3], "s2,srq,,,,,,,,Infeasible");
  EXPECT_EQ(lines[4].rfind("mean,all,3.0", 0), 0U);
  EXPECT_NE(lines[4].find(",15.0"), std::string::npos);
  EXPECT_NE(lines[4].find(",2.5"), std::string::npos);
}

}  // namespace
}  // namespace occrisk
