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

#ifndef OCCRISK__DEMO_HPP_
#define OCCRISK__DEMO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "occrisk/planner.hpp"
#include "occrisk/scene.hpp"

namespace occrisk
{

enum class DemoArchetype { t_junction, wall_crossing, parked_bus };

const char * to_string(DemoArchetype archetype);

struct DemoScenario
{
  std::string id;
  Scenario scenario;
};

/// One synthetic occlusion scenario. Junction position, ego speed, wall offsets and traffic
/// speeds are drawn from `seed`. The recorded ego motion is the occlusion-blind plan under
/// `weights`, i.e. what a driver ignoring the hidden lanes would have done.
Scenario make_demo_scenario(
  DemoArchetype archetype, std::uint64_t seed, const PlannerWeights & weights = {});

/// `count` scenarios cycling through the archetypes, ids demo_000, demo_001, ...
std::vector<DemoScenario> make_demo_suite(
  std::uint64_t seed, int count, const PlannerWeights & weights = {});

}  // namespace occrisk

#endif  // OCCRISK__DEMO_HPP_
