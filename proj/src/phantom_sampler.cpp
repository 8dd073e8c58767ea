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

#include "occrisk/phantom_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "occrisk/errors.hpp"
#include "occrisk/rng.hpp"

namespace occrisk
{

bool PhantomConfig::valid() const
{
  return speed_min >= 0.0 && speed_min < speed_max && max_phantoms_per_segment >= 1 &&
         spacing_min >= 2.0 * footprint.half_length && max_attempts > 0;
}

Scenario sample_phantoms(
  const Scenario & scenario, const std::vector<OccludedSegment> & segments,
  const PhantomConfig & cfg, const FieldOfView * fov)
{
  if (!cfg.valid()) {
    throw UsageError("invalid phantom configuration");
  }
  Scenario out = scenario;
  if (segments.empty()) {
    return out;
  }
  out.metadata["phantom_seed"] = std::to_string(cfg.rng_seed);

  const CounterRng root(cfg.rng_seed);
  std::map<std::string, std::vector<Vec2>> placed_by_lane;

  for (std::size_t seg_idx = 0; seg_idx < segments.size(); ++seg_idx) {
    const auto & seg = segments[seg_idx];
    const LaneSegment * lane = scenario.find_lane(seg.lane_id);
    if (lane == nullptr || !(seg.s_end > seg.s_start)) {
      continue;
    }
    CounterRng rng = root.substream(seg_idx);
    const std::uint64_t stream_seed = rng.key();
    auto & placed = placed_by_lane[seg.lane_id];
    auto spaced = [&](const Vec2 & p) {
      return std::all_of(placed.begin(), placed.end(), [&](const Vec2 & q) {
        return distance(p, q) >= cfg.spacing_min;
      });
    };

    std::vector<double> positions;
    const double length = seg.length();
    if (length < cfg.spacing_min) {
      const double s = 0.5 * (seg.s_start + seg.s_end);
      if (spaced(lane->centerline.point_at(s))) {
        positions.push_back(s);
        placed.push_back(lane->centerline.point_at(s));
      }
    } else {
      const auto cap = static_cast<std::int64_t>(std::floor(length / cfg.spacing_min));
      const std::int64_t count =
        std::min<std::int64_t>(rng.uniform_int(1, cfg.max_phantoms_per_segment), cap);
      for (std::int64_t k = 0; k < count; ++k) {
        for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
          const double s = rng.uniform(seg.s_start, seg.s_end);
          if (!(s > seg.s_start && s < seg.s_end)) {
            continue;
          }
          const Vec2 p = lane->centerline.point_at(s);
          if (!spaced(p) || (fov != nullptr && fov_contains(*fov, p))) {
            continue;
          }
          positions.push_back(s);
          placed.push_back(p);
          break;
        }
      }
    }

    for (std::size_t k = 0; k < positions.size(); ++k) {
      const double s = positions[k];
      const Vec2 p = lane->centerline.point_at(s);
      AgentLog phantom;
      phantom.id = "phantom_" + std::to_string(seg_idx) + "_" + std::to_string(k);
      phantom.kind = AgentKind::phantom;
      phantom.footprint = cfg.footprint;
      phantom.states.push_back(
        {0.0, p.x, p.y, lane->centerline.heading_at(s), rng.uniform(cfg.speed_min, cfg.speed_max)});
      out.phantoms.push_back({phantom.id, seg.lane_id, s, stream_seed});
      out.agents.push_back(std::move(phantom));
    }
  }
  return out;
}

}  // namespace occrisk
