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

#ifndef OCCRISK__VISIBILITY_HPP_
#define OCCRISK__VISIBILITY_HPP_

#include <string>
#include <vector>

#include "occrisk/geometry.hpp"
#include "occrisk/scene.hpp"

namespace occrisk
{

struct Ray
{
  double angle{0.0};
  double distance{0.0};
};

/// Fan of rays in the world frame. Ray i points at -pi + 2 pi i / n.
struct FieldOfView
{
  Vec2 origin;
  std::vector<Ray> rays;
  double max_range{80.0};
};

struct OccludedSegment
{
  std::string lane_id;
  double s_start{0.0};
  double s_end{0.0};

  double length() const { return s_end - s_start; }
};

struct VisibilityConfig
{
  int ray_count{360};
  double max_range{80.0};
  double sample_step{0.5};
  double min_segment_length{4.8};
  /// Recompute the field of view at every planning step instead of once at t = 0.
  bool recompute_each_step{false};
};

/// Blocking geometry at time t: occluder edges and oriented boxes of logged (non-phantom)
/// agents. Throws EgoInsideObstacle when `origin` lies inside any of them.
FieldOfView cast_fov(
  const Scenario & scenario, const Vec2 & origin, double t, int ray_count, double max_range);

/// Visibility test with conservative interpolation: the smaller of the two bracketing ray
/// distances bounds the visible range at the point's bearing.
bool fov_contains(const FieldOfView & fov, const Vec2 & point);

/// Maximal runs of occluded centerline samples, one list sorted by lane order then s_start.
std::vector<OccludedSegment> occluded_segments(
  const Scenario & scenario, const FieldOfView & fov, double sample_step,
  double min_segment_length = 4.8);

}  // namespace occrisk

#endif  // OCCRISK__VISIBILITY_HPP_
