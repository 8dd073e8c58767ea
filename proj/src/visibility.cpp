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

#include "occrisk/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "occrisk/errors.hpp"

namespace occrisk
{

namespace
{

struct Segment
{
  Vec2 a;
  Vec2 b;
};

void add_polygon_edges(const Polygon & poly, std::vector<Segment> & out)
{
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out.push_back({poly[i], poly[(i + 1) % poly.size()]});
  }
}

}  // namespace

FieldOfView cast_fov(
  const Scenario & scenario, const Vec2 & origin, double t, int ray_count, double max_range)
{
  std::vector<Segment> blockers;
  for (std::size_t i = 0; i < scenario.occluders.size(); ++i) {
    const auto & poly = scenario.occluders[i];
    if (point_in_polygon(origin, poly)) {
      throw EgoInsideObstacle("ego origin lies inside occluder " + std::to_string(i));
    }
    add_polygon_edges(poly, blockers);
  }
  for (const auto & agent : scenario.agents) {
    if (agent.kind == AgentKind::phantom || agent.states.empty()) {
      continue;
    }
    const auto & st = agent.state_near(t, scenario.dt);
    const Polygon box = oriented_box(
      st.position(), st.heading, agent.footprint.half_length, agent.footprint.half_width);
    if (point_in_polygon(origin, box)) {
      throw EgoInsideObstacle("ego origin lies inside agent " + agent.id);
    }
    add_polygon_edges(box, blockers);
  }

  FieldOfView fov;
  fov.origin = origin;
  fov.max_range = max_range;
  fov.rays.reserve(static_cast<std::size_t>(ray_count));
  const double step = 2.0 * std::numbers::pi / ray_count;
  for (int i = 0; i < ray_count; ++i) {
    const double angle = -std::numbers::pi + step * i;
    const Vec2 dir = unit_from_angle(angle);
    double range = max_range;
    for (const auto & seg : blockers) {
      if (const auto hit = ray_segment_range(origin, dir, seg.a, seg.b)) {
        range = std::min(range, *hit);
      }
    }
    fov.rays.push_back({angle, range});
  }
  return fov;
}

bool fov_contains(const FieldOfView & fov, const Vec2 & point)
{
  const Vec2 rel = point - fov.origin;
  const double range = norm(rel);
  if (range == 0.0) {
    return true;
  }
  if (range > fov.max_range || fov.rays.empty()) {
    return false;
  }
  const std::size_t n = fov.rays.size();
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double bearing = std::atan2(rel.y, rel.x);
  const double u = (bearing + std::numbers::pi) / step;
  auto lo = static_cast<std::size_t>(std::floor(u)) % n;
  const double frac = u - std::floor(u);
  double limit = fov.rays[lo].distance;
  if (frac > 0.0) {
    limit = std::min(limit, fov.rays[(lo + 1) % n].distance);
  }
  return range <= limit;
}

std::vector<OccludedSegment> occluded_segments(
  const Scenario & scenario, const FieldOfView & fov, double sample_step,
  double min_segment_length)
{
  std::vector<OccludedSegment> out;
  for (const auto & lane : scenario.lanes) {
    const double length = lane.centerline.length();
    const auto count = static_cast<std::size_t>(std::floor(length / sample_step));
    std::vector<double> samples;
    samples.reserve(count + 2);
    for (std::size_t i = 0; i <= count; ++i) {
      samples.push_back(static_cast<double>(i) * sample_step);
    }
    if (length - samples.back() > 1e-9) {
      samples.push_back(length);
    }

    bool in_run = false;
    double run_start = 0.0;
    double run_end = 0.0;
    auto close_run = [&]() {
      if (in_run && run_end - run_start >= min_segment_length && run_end > run_start) {
        out.push_back({lane.id, run_start, run_end});
      }
      in_run = false;
    };
    for (const double s : samples) {
      const Vec2 p = lane.centerline.point_at(s);
      const bool occluded =
        distance(p, fov.origin) <= fov.max_range && !fov_contains(fov, p);
      if (occluded) {
        if (!in_run) {
          in_run = true;
          run_start = s;
        }
        run_end = s;
      } else {
        close_run();
      }
    }
    close_run();
  }
  return out;
}

}  // namespace occrisk
