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

#ifndef OCCRISK__SCENARIO_IO_HPP_
#define OCCRISK__SCENARIO_IO_HPP_

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "occrisk/scene.hpp"

namespace occrisk
{

inline constexpr int kScenarioSchemaVersion = 1;

nlohmann::json scenario_to_json(const Scenario & scenario);
/// Throws FormatError on schema violations (missing or unknown keys, wrong types).
Scenario scenario_from_json(const nlohmann::json & doc);

std::string serialize_scenario(const Scenario & scenario);
Scenario parse_scenario(std::string_view text);

Scenario read_scenario(const std::filesystem::path & path);
void write_scenario(const std::filesystem::path & path, const Scenario & scenario);

/// Throws FormatError naming `context` when `obj` carries a key outside `allowed`.
void require_known_keys(
  const nlohmann::json & obj, std::initializer_list<std::string_view> allowed,
  std::string_view context);

std::string read_text_file(const std::filesystem::path & path);
void write_text_file(const std::filesystem::path & path, std::string_view text);

}  // namespace occrisk

#endif  // OCCRISK__SCENARIO_IO_HPP_
