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

#ifndef OCCRISK__PHANTOM_SAMPLER_HPP_
#define OCCRISK__PHANTOM_SAMPLER_HPP_

#include <cstdint>
#include <vector>

#include "occrisk/scene.hpp"
#include "occrisk/visibility.hpp"

namespace occrisk
{

struct PhantomConfig
{
  double speed_min{3.0};
  double speed_max{15.0};
  int max_phantoms_per_segment{2};
  double spacing_min{10.0};
  std::uint64_t rng_seed{0};
  Footprint footprint{};
  /// Rejection draws per phantom before giving up on it.
  int max_attempts{64};

  bool valid() const;
};

/// Extends the scenario with phantom agents (initial states only) placed uniformly inside each
/// occluded segment. Segment i draws from substream i of the configured seed, so the result is a
/// pure function of the inputs. When `fov` is given, positions visible in it are rejected.
Scenario sample_phantoms(
  const Scenario & scenario, const std::vector<OccludedSegment> & segments,
  const PhantomConfig & cfg, const FieldOfView * fov = nullptr);

}  // namespace occrisk

#endif  // OCCRISK__PHANTOM_SAMPLER_HPP_
