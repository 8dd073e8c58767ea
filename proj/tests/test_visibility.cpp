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

#include <cmath>
#include <numbers>

#include "occrisk/errors.hpp"
#include "occrisk/rng.hpp"
#include "occrisk/visibility.hpp"
#include "support.hpp"

namespace occrisk
{
namespace
{

using testing::constant_agent;
using testing::straight_lane;

constexpr double kPi = std::numbers::pi;

Polygon box(double x0, double y0, double x1, double y1)
{
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Scenario open_scene()
{
  Scenario sc;
  sc.lanes.push_back(straight_lane("ego_lane", {-50.0, 0.0}, {100.0, 0.0}));
  sc.ego.initial = {0.0, 0.0, 0.0, 5.0};
  sc.ego.reference_path = Polyline({{0.0, 0.0}, {100.0, 0.0}});
  return sc;
}

/// Exact line-of-sight: no occluder edge crosses the segment from the origin to p.
bool exactly_visible(const Scenario & sc, const Vec2 & origin, const Vec2 & p, double max_range)
{
  if (distance(origin, p) > max_range) {
    return false;
  }
  for (const auto & poly : sc.occluders) {
    for (std::size_t k = 0; k < poly.size(); ++k) {
      if (segment_intersection(origin, p, poly[k], poly[(k + 1) % poly.size()])) {
        return false;
      }
    }
  }
  return true;
}

/// Occluded runs of lane samples under the exact test, as [s_first, s_last] pairs.
std::vector<std::pair<double, double>> oracle_runs(
  const Scenario & sc, const LaneSegment & lane, double step, double max_range)
{
  std::vector<std::pair<double, double>> runs;
  bool open = false;
  for (double s = 0.0; s <= lane.centerline.length(); s += step) {
    const bool occ =
      !exactly_visible(sc, sc.ego.initial.position(), lane.centerline.point_at(s), max_range);
    if (occ && !open) {
      runs.push_back({s, s});
      open = true;
    } else if (occ) {
      runs.back().second = s;
    } else {
      open = false;
    }
  }
  return runs;
}

TEST(CastFov, UnobstructedRaysReachMaxRange)
{
  const auto fov = cast_fov(open_scene(), {0.0, 0.0}, 0.0, 360, 80.0);
  ASSERT_EQ(fov.rays.size(), 360u);
  for (std::size_t i = 0; i < fov.rays.size(); ++i) {
    EXPECT_DOUBLE_EQ(fov.rays[i].distance, 80.0);
    EXPECT_NEAR(fov.rays[i].angle, -kPi + 2.0 * kPi * static_cast<double>(i) / 360.0, 1e-12);
  }
}

TEST(CastFov, SquareWallAhead)
{
  Scenario sc = open_scene();
  sc.occluders.push_back(box(9.0, -1.0, 11.0, 1.0));
  const auto fov = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
  EXPECT_NEAR(fov.rays[180].distance, 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(fov.rays[0].distance, 80.0);
  EXPECT_DOUBLE_EQ(fov.rays[90].distance, 80.0);
}

TEST(CastFov, RotationShiftsTheProfile)
{
  Scenario sc = open_scene();
  sc.occluders.push_back(box(9.0, -1.0, 11.0, 1.0));
  sc.occluders.push_back(box(-20.0, 8.0, -5.0, 12.0));
  const int n = 360;
  const int shift = 37;
  const double theta = 2.0 * kPi * shift / n;
  Scenario rotated = sc;
  for (auto & poly : rotated.occluders) {
    for (auto & v : poly) {
      v = rotate(v, theta);
    }
  }
  const auto a = cast_fov(sc, {0.0, 0.0}, 0.0, n, 80.0);
  const auto b = cast_fov(rotated, {0.0, 0.0}, 0.0, n, 80.0);
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(b.rays[(i + shift) % n].distance, a.rays[i].distance, 1e-9) << "ray " << i;
  }
}

TEST(CastFov, AgentsOccludeAtTimeTButPhantomsNever)
{
  Scenario sc = open_scene();
  sc.agents.push_back(constant_agent("car", {10.0, -10.0, kPi / 2.0, 10.0}, sc.dt, sc.steps()));
  sc.agents.push_back(
    constant_agent("ghost", {0.0, 10.0, 0.0, 0.0}, sc.dt, sc.steps(), AgentKind::phantom));
  // At t = 1 s the car is centered at (10, 0), its rear-to-front box spans y in [-2.4, 2.4].
  const auto fov = cast_fov(sc, {0.0, 0.0}, 1.0, 360, 80.0);
  EXPECT_NEAR(fov.rays[180].distance, 9.0, 1e-9);
  EXPECT_DOUBLE_EQ(fov.rays[270].distance, 80.0);
  const auto early = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
  EXPECT_DOUBLE_EQ(early.rays[180].distance, 80.0);
}

TEST(CastFov, EgoInsideObstacleThrows)
{
  Scenario sc = open_scene();
  sc.occluders.push_back(box(-1.0, -1.0, 1.0, 1.0));
  EXPECT_THROW(cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0), EgoInsideObstacle);
}

TEST(FovContains, OriginAndRange)
{
  const auto fov = cast_fov(open_scene(), {0.0, 0.0}, 0.0, 360, 80.0);
  EXPECT_TRUE(fov_contains(fov, {0.0, 0.0}));
  EXPECT_TRUE(fov_contains(fov, {79.0, 3.0}));
  EXPECT_FALSE(fov_contains(fov, {80.5, 0.0}));
}

TEST(FovContains, MatchesExactVisibilityAwayFromShadowEdges)
{
  Scenario sc = open_scene();
  sc.occluders.push_back(box(10.0, 5.0, 11.0, 25.0));
  sc.occluders.push_back(box(-15.0, -12.0, -8.0, -6.0));
  const Vec2 o{0.0, 0.0};
  const auto fov = cast_fov(sc, o, 0.0, 3600, 80.0);
  CounterRng rng(3);
  int checked = 0;
  int shadowed = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const Vec2 p{rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)};
    const bool truth = exactly_visible(sc, o, p, 80.0);
    // Skip points whose verdict flips within 0.3 degrees of bearing.
    bool stable = true;
    for (const double d : {-0.3, 0.3}) {
      const Vec2 q = rotate(p, d * kPi / 180.0);
      stable = stable && exactly_visible(sc, o, q, 80.0) == truth;
    }
    if (!stable) {
      continue;
    }
    ++checked;
    shadowed += truth ? 0 : 1;
    EXPECT_EQ(fov_contains(fov, p), truth) << p.x << "," << p.y;
  }
  EXPECT_GT(checked, 3500);
  EXPECT_GT(shadowed, 100);
}

Scenario side_lane_scene()
{
  Scenario sc = open_scene();
  sc.lanes.push_back(straight_lane("side", {20.0, -40.0}, {20.0, 40.0}));
  return sc;
}

void expect_matches_oracle(const Scenario & sc, std::size_t expected_runs)
{
  const double step = 0.5;
  const auto fov = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
  const auto segs = occluded_segments(sc, fov, step, 4.8);
  const auto runs = oracle_runs(sc, sc.lanes[1], step, 80.0);
  std::vector<OccludedSegment> side;
  for (const auto & s : segs) {
    if (s.lane_id == "side") {
      side.push_back(s);
    }
  }
  ASSERT_EQ(runs.size(), expected_runs);
  ASSERT_EQ(side.size(), runs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    // One ray spacing at 45 m is ~0.8 m; the conservative test may widen a segment by that much.
    EXPECT_NEAR(side[k].s_start, runs[k].first, 1.0);
    EXPECT_NEAR(side[k].s_end, runs[k].second, 1.0);
  }
}

TEST(OccludedSegments, FullyVisibleSceneHasNone)
{
  const Scenario sc = side_lane_scene();
  const auto fov = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
  EXPECT_TRUE(occluded_segments(sc, fov, 0.5).empty());
}

TEST(OccludedSegments, LongWallCastsOneSegment)
{
  Scenario sc = side_lane_scene();
  sc.occluders.push_back(box(10.0, 5.0, 11.0, 25.0));
  expect_matches_oracle(sc, 1);
}

TEST(OccludedSegments, GapBetweenWallsSplitsTheShadow)
{
  Scenario sc = side_lane_scene();
  sc.occluders.push_back(box(10.0, 5.0, 11.0, 12.0));
  sc.occluders.push_back(box(10.0, 16.0, 11.0, 25.0));
  expect_matches_oracle(sc, 2);
}

TEST(OccludedSegments, ShortRunsAreDropped)
{
  Scenario sc = side_lane_scene();
  sc.occluders.push_back(box(10.0, 5.0, 10.5, 6.0));
  const auto fov = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
  EXPECT_TRUE(occluded_segments(sc, fov, 0.5, 4.8).empty());
  EXPECT_EQ(occluded_segments(sc, fov, 0.5, 0.5).size(), 1u);
}

Scenario random_walls(CounterRng & rng, int count)
{
  Scenario sc = side_lane_scene();
  sc.lanes.push_back(straight_lane("north", {-40.0, 15.0}, {40.0, 15.0}));
  for (int k = 0; k < count; ++k) {
    double x = 0.0;
    double y = 0.0;
    do {
      x = rng.uniform(-30.0, 30.0);
      y = rng.uniform(-30.0, 30.0);
    } while (std::hypot(x, y) < 6.0);
    sc.occluders.push_back(box(x, y, x + rng.uniform(0.5, 6.0), y + rng.uniform(0.5, 6.0)));
  }
  return sc;
}

TEST(VisibilityProperties, AddingAnOccluderIsMonotone)
{
  CounterRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Scenario sc = random_walls(rng, 3);
    const auto before = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
    const auto segs_before = occluded_segments(sc, before, 0.5, 0.0);
    Scenario more = sc;
    const double x = rng.uniform(6.0, 30.0);
    const double y = rng.uniform(-30.0, 30.0);
    more.occluders.push_back(box(x, y, x + 2.0, y + 3.0));
    const auto after = cast_fov(more, {0.0, 0.0}, 0.0, 360, 80.0);
    for (std::size_t i = 0; i < before.rays.size(); ++i) {
      EXPECT_LE(after.rays[i].distance, before.rays[i].distance);
    }
    const auto segs_after = occluded_segments(more, after, 0.5, 0.0);
    for (const auto & s : segs_before) {
      const bool covered = std::any_of(segs_after.begin(), segs_after.end(), [&](const auto & a) {
        return a.lane_id == s.lane_id && a.s_start <= s.s_start + 1e-9 && a.s_end >= s.s_end - 1e-9;
      });
      EXPECT_TRUE(covered) << s.lane_id << " [" << s.s_start << ", " << s.s_end << "]";
    }
  }
}

TEST(VisibilityProperties, SegmentsAreSortedAndDisjoint)
{
  CounterRng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario sc = random_walls(rng, 5);
    const auto fov = cast_fov(sc, {0.0, 0.0}, 0.0, 360, 80.0);
    const auto segs = occluded_segments(sc, fov, 0.5);
    for (std::size_t k = 0; k < segs.size(); ++k) {
      EXPECT_LT(segs[k].s_start, segs[k].s_end);
      EXPECT_GE(segs[k].s_start, 0.0);
      EXPECT_LE(segs[k].s_end, sc.find_lane(segs[k].lane_id)->centerline.length() + 1e-9);
      if (k > 0 && segs[k - 1].lane_id == segs[k].lane_id) {
        EXPECT_LT(segs[k - 1].s_end, segs[k].s_start);
      }
    }
  }
}

/// Distance from p to the nearest shadow boundary: occluder edges, the rays cast outward from
/// each occluder vertex, and the max-range circle.
double shadow_boundary_distance(const Scenario & sc, const Vec2 & p, double max_range)
{
  double d = std::abs(norm(p) - max_range);
  for (const auto & poly : sc.occluders) {
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec2 a = poly[k];
      d = std::min(d, point_segment_distance(p, a, poly[(k + 1) % poly.size()]));
      d = std::min(d, point_segment_distance(p, a, a * (4.0 * max_range / norm(a))));
    }
  }
  return d;
}

TEST(VisibilityProperties, DoublingRaysOnlyChangesVerdictsNearShadowEdges)
{
  CounterRng rng(10);
  const int n = 180;
  const double max_range = 80.0;
  const double band = 2.0 * max_range * kPi / n;
  for (int trial = 0; trial < 5; ++trial) {
    const Scenario sc = random_walls(rng, 4);
    const auto coarse = cast_fov(sc, {0.0, 0.0}, 0.0, n, max_range);
    const auto fine = cast_fov(sc, {0.0, 0.0}, 0.0, 2 * n, max_range);
    for (int k = 0; k < 2000; ++k) {
      const Vec2 p{rng.uniform(-90.0, 90.0), rng.uniform(-90.0, 90.0)};
      if (fov_contains(coarse, p) != fov_contains(fine, p)) {
        EXPECT_LE(shadow_boundary_distance(sc, p, max_range), band) << p.x << "," << p.y;
      }
    }
  }
}

}  // namespace
}  // namespace occrisk
