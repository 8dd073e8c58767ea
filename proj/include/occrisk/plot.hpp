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

#ifndef OCCRISK__PLOT_HPP_
#define OCCRISK__PLOT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "occrisk/pipeline.hpp"
#include "occrisk/risk_field.hpp"
#include "occrisk/scene.hpp"

namespace occrisk
{

struct Rgb
{
  std::uint8_t r{255};
  std::uint8_t g{255};
  std::uint8_t b{255};

  bool operator==(const Rgb &) const = default;
  bool neutral() const { return r == g && g == b; }
};

/// 8-bit RGB raster, row 0 at the top.
struct Image
{
  int width{0};
  int height{0};
  std::vector<Rgb> pixels;

  Image() = default;
  Image(int w, int h, Rgb fill = {});

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, Rgb c);
};

/// Binary PPM (P6, maxval 255).
std::string encode_ppm(const Image & image);
Image decode_ppm(std::string_view bytes);
void write_ppm(const std::filesystem::path & path, const Image & image);

/// White at 0, yellow at 0.5, pure red at 1; clamps outside [0, 1].
Rgb risk_color(double risk);
Rgb planner_color(PlannerKind kind);

struct HeatmapOptions
{
  bool show_fov{true};
  int ray_count{360};
  double max_range{80.0};
};

/// One pixel per grid cell, +y up. Lanes are gray corridors, occluders dark gray, agents at
/// t = 0 outlined (ego filled), the t = 0 field of view darkened; the total layer multiplies
/// in through risk_color. Everything but the risk layer is gray, so a zero grid leaves no
/// colored pixel. Throws FormatError when the grid does not cover the ego start.
Image render_heatmap(
  const Scenario & scenario, const RiskGrid & grid, const HeatmapOptions & options = {});

struct ProfileOptions
{
  int width{640};
  int height{400};
};

/// Maps (s, v) into the plot area of a profile image.
struct ProfileAxes
{
  int left{0};
  int top{0};
  int right{0};
  int bottom{0};
  double s_max{1.0};
  double v_max{1.0};

  int x_of(double s) const;
  int y_of(double v) const;
};

/// Axes shared by every successful record in `records`.
ProfileAxes profile_axes(
  const std::vector<PlanRecord> & records, const ProfileOptions & options = {});

/// v against travelled distance s, one curve per successful record in planner_color, legend
/// top right. Throws UsageError when no record has a profile.
Image render_profile(const std::vector<PlanRecord> & records, const ProfileOptions & options = {});

}  // namespace occrisk

#endif  // OCCRISK__PLOT_HPP_
