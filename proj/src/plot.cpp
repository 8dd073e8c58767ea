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

#include "occrisk/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "occrisk/errors.hpp"
#include "occrisk/visibility.hpp"

namespace occrisk
{

Image::Image(int w, int h, Rgb fill)
: width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
{
}

void Image::set(int x, int y, Rgb c)
{
  if (contains(x, y)) {
    pixels[static_cast<std::size_t>(y) * width + x] = c;
  }
}

std::string encode_ppm(const Image & image)
{
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
    "\n255\n";
  out.reserve(out.size() + image.pixels.size() * 3);
  for (const auto & p : image.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

Image decode_ppm(std::string_view bytes)
{
  int w = 0;
  int h = 0;
  int maxval = 0;
  int consumed = 0;
  const std::string head(bytes.substr(0, std::min<std::size_t>(bytes.size(), 64)));
  if (std::sscanf(head.c_str(), "P6 %d %d %d%n", &w, &h, &maxval, &consumed) != 3 ||
    maxval != 255 || w < 0 || h < 0)
  {
    throw FormatError("ppm: bad header");
  }
  const std::size_t offset = static_cast<std::size_t>(consumed) + 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() != offset + 3 * n) {
    throw FormatError("ppm: payload size mismatch");
  }
  Image image(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    image.pixels[i] = {
      static_cast<std::uint8_t>(bytes[offset + 3 * i]),
      static_cast<std::uint8_t>(bytes[offset + 3 * i + 1]),
      static_cast<std::uint8_t>(bytes[offset + 3 * i + 2])};
  }
  return image;
}

void write_ppm(const std::filesystem::path & path, const Image & image)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw FormatError("cannot write " + path.string());
  }
  const std::string bytes = encode_ppm(image);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace
{

std::uint8_t to_byte(double v)
{
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

Rgb gray(std::uint8_t level) { return {level, level, level}; }

Rgb multiply(Rgb a, Rgb b)
{
  return {
    to_byte(a.r * b.r / 255.0), to_byte(a.g * b.g / 255.0), to_byte(a.b * b.b / 255.0)};
}

Rgb scale(Rgb a, double k) { return {to_byte(a.r * k), to_byte(a.g * k), to_byte(a.b * k)}; }

void draw_line(Image & img, int x0, int y0, int x1, int y1, Rgb c)
{
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    img.set(x0, y0, c);
    if (x0 == x1 && y0 == y1) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void fill_rect(Image & img, int x0, int y0, int x1, int y1, Rgb c)
{
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      img.set(x, y, c);
    }
  }
}

// 5x7 glyphs, '#' lit.
using Glyph = std::array<const char *, 7>;

const std::map<char, Glyph> & font()
{
  static const std::map<char, Glyph> glyphs{
    {'0', {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
    {'1', {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
    {'2', {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"}},
    {'3', {"#####", "   # ", "  #  ", "   # ", "    #", "#   #", " ### "}},
    {'4', {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
    {'5', {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
    {'6', {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "}},
    {'7', {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "}},
    {'8', {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
    {'9', {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "}},
    {'.', {"     ", "     ", "     ", "     ", "     ", " ##  ", " ##  "}},
    {'-', {"     ", "     ", "     ", "#####", "     ", "     ", "     "}},
    {'_', {"     ", "     ", "     ", "     ", "     ", "     ", "#####"}},
    {'/', {"     ", "    #", "   # ", "  #  ", " #   ", "#    ", "     "}},
    {'[', {" ### ", " #   ", " #   ", " #   ", " #   ", " #   ", " ### "}},
    {']', {" ### ", "   # ", "   # ", "   # ", "   # ", "   # ", " ### "}},
    {'a', {"     ", "     ", " ### ", "    #", " ####", "#   #", " ####"}},
    {'b', {"#    ", "#    ", "# ## ", "##  #", "#   #", "#   #", "#### "}},
    {'c', {"     ", "     ", " ### ", "#    ", "#    ", "#   #", " ### "}},
    {'d', {"    #", "    #", " ## #", "#  ##", "#   #", "#   #", " ####"}},
    {'e', {"     ", "     ", " ### ", "#   #", "#####", "#    ", " ### "}},
    {'f', {"  ## ", " #  #", " #   ", "###  ", " #   ", " #   ", " #   "}},
    {'g', {"     ", " ####", "#   #", "#   #", " ####", "    #", " ### "}},
    {'h', {"#    ", "#    ", "# ## ", "##  #", "#   #", "#   #", "#   #"}},
    {'i', {"  #  ", "     ", " ##  ", "  #  ", "  #  ", "  #  ", " ### "}},
    {'j', {"   # ", "     ", "  ## ", "   # ", "   # ", "#  # ", " ##  "}},
    {'k', {"#    ", "#    ", "#  # ", "# #  ", "##   ", "# #  ", "#  # "}},
    {'l', {" ##  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
    {'m', {"     ", "     ", "## # ", "# # #", "# # #", "#   #", "#   #"}},
    {'n', {"     ", "     ", "# ## ", "##  #", "#   #", "#   #", "#   #"}},
    {'o', {"     ", "     ", " ### ", "#   #", "#   #", "#   #", " ### "}},
    {'p', {"     ", "     ", "#### ", "#   #", "#### ", "#    ", "#    "}},
    {'q', {"     ", "     ", " ## #", "#  ##", " ####", "    #", "    #"}},
    {'r', {"     ", "     ", "# ## ", "##  #", "#    ", "#    ", "#    "}},
    {'s', {"     ", "     ", " ####", "#    ", " ### ", "    #", "#### "}},
    {'t', {" #   ", " #   ", "###  ", " #   ", " #   ", " #  #", "  ## "}},
    {'u', {"     ", "     ", "#   #", "#   #", "#   #", "#  ##", " ## #"}},
    {'v', {"     ", "     ", "#   #", "#   #", "#   #", " # # ", "  #  "}},
    {'w', {"     ", "     ", "#   #", "#   #", "# # #", "# # #", " # # "}},
    {'x', {"     ", "     ", "#   #", " # # ", "  #  ", " # # ", "#   #"}},
    {'y', {"     ", "     ", "#   #", "#   #", " ####", "    #", " ### "}},
    {'z', {"     ", "     ", "#####", "   # ", "  #  ", " #   ", "#####"}},
  };
  return glyphs;
}

constexpr int kGlyphAdvance = 6;

/// Top-left anchored; unknown characters advance without ink.
void draw_text(Image & img, int x, int y, std::string_view text, Rgb c)
{
  for (const char ch : text) {
    const auto it = font().find(ch);
    if (it != font().end()) {
      for (int row = 0; row < 7; ++row) {
        for (int col = 0; col < 5; ++col) {
          if (it->second[row][col] == '#') {
            img.set(x + col, y + row, c);
          }
        }
      }
    }
    x += kGlyphAdvance;
  }
}

int text_width(std::string_view text) { return static_cast<int>(text.size()) * kGlyphAdvance - 1; }

double nice_step(double raw)
{
  if (!(raw > 0.0)) {
    return 1.0;
  }
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  const double m = raw / p;
  return (m <= 1.0 ? 1.0 : m <= 2.0 ? 2.0 : m <= 5.0 ? 5.0 : 10.0) * p;
}

double nice_ceiling(double x)
{
  const double step = nice_step(x / 5.0);
  return std::max(step, std::ceil(x / step - 1e-9) * step);
}

std::string tick_label(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

Rgb risk_color(double risk)
{
  const double r = std::isnan(risk) ? 0.0 : std::clamp(risk, 0.0, 1.0);
  if (r <= 0.5) {
    return {255, 255, to_byte(255.0 * (1.0 - 2.0 * r))};
  }
  return {255, to_byte(255.0 * (2.0 - 2.0 * r)), 0};
}

Rgb planner_color(PlannerKind kind)
{
  switch (kind) {
    case PlannerKind::risk_aware:
      return {220, 30, 30};
    case PlannerKind::noap:
      return {30, 80, 220};
    case PlannerKind::srq:
      return {30, 160, 60};
    case PlannerKind::opbp:
      return {230, 140, 0};
  }
  return gray(0);
}

Image render_heatmap(
  const Scenario & scenario, const RiskGrid & grid, const HeatmapOptions & options)
{
  const GridSpec & spec = grid.spec;
  if (grid.total.size() != spec.size() || spec.size() == 0) {
    throw FormatError("heatmap: grid payload does not match its header");
  }
  if (!spec.cell_of(scenario.ego.initial.position())) {
    throw FormatError("heatmap: grid does not cover the scenario's ego start");
  }
  const int w = spec.n1;
  const int h = spec.n2;
  Image img(w, h);

  std::optional<FieldOfView> fov;
  if (options.show_fov) {
    fov = cast_fov(
      scenario, scenario.ego.initial.position(), 0.0, options.ray_count, options.max_range);
  }
  for (int y = 0; y < h; ++y) {
    const int j = h - 1 - y;
    for (int x = 0; x < w; ++x) {
      const Vec2 c = spec.center(x, j);
      Rgb px = road_sdf(c, scenario.lanes) <= 0.0 ? gray(200) : gray(255);
      px = multiply(px, risk_color(grid.total[spec.index(x, j)]));
      if (fov && fov_contains(*fov, c)) {
        px = scale(px, 0.85);
      }
      img.set(x, y, px);
    }
  }

  const auto to_px = [&](const Vec2 & p) {
    return std::pair<int, int>{
      static_cast<int>(std::floor((p.x - spec.origin.x) / spec.resolution)),
      h - 1 - static_cast<int>(std::floor((p.y - spec.origin.y) / spec.resolution))};
  };
  const auto fill_polygon = [&](const Polygon & poly, Rgb c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (point_in_polygon(spec.center(x, h - 1 - y), poly)) {
          img.set(x, y, c);
        }
      }
    }
  };
  const auto outline = [&](const Polygon & poly, Rgb c) {
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const auto [x0, y0] = to_px(poly[k]);
      const auto [x1, y1] = to_px(poly[(k + 1) % poly.size()]);
      draw_line(img, x0, y0, x1, y1, c);
    }
  };

  for (const auto & occluder : scenario.occluders) {
    fill_polygon(occluder, gray(110));
  }
  for (const auto & agent : scenario.agents) {
    if (agent.states.empty()) {
      continue;
    }
    const auto & s = agent.states.front();
    const auto box = oriented_box(
      {s.x, s.y}, s.heading, agent.footprint.half_length, agent.footprint.half_width);
    outline(box, agent.kind == AgentKind::phantom ? gray(120) : gray(40));
  }
  const auto & e = scenario.ego.initial;
  const auto ego_box = oriented_box(
    e.position(), e.heading, scenario.ego.footprint.half_length, scenario.ego.footprint.half_width);
  fill_polygon(ego_box, gray(30));
  outline(ego_box, gray(0));
  return img;
}

int ProfileAxes::x_of(double s) const
{
  return left + static_cast<int>(std::lround(s / s_max * (right - left)));
}

int ProfileAxes::y_of(double v) const
{
  return bottom - static_cast<int>(std::lround(v / v_max * (bottom - top)));
}

ProfileAxes profile_axes(const std::vector<PlanRecord> & records, const ProfileOptions & options)
{
  ProfileAxes axes;
  axes.left = 48;
  axes.top = 20;
  axes.right = options.width - 110;
  axes.bottom = options.height - 36;
  double s_max = 0.0;
  double v_max = 0.0;
  for (const auto & rec : records) {
    if (!rec.error.empty()) {
      continue;
    }
    const auto & p = rec.result.profile;
    for (const double s : p.s) {
      s_max = std::max(s_max, s);
    }
    for (const double v : p.v) {
      v_max = std::max(v_max, v);
    }
  }
  axes.s_max = nice_ceiling(std::max(s_max, 1.0));
  axes.v_max = nice_ceiling(std::max(v_max, 1.0));
  return axes;
}

Image render_profile(const std::vector<PlanRecord> & records, const ProfileOptions & options)
{
  std::vector<const PlanRecord *> drawn;
  for (const auto & rec : records) {
    if (rec.error.empty() && !rec.result.profile.v.empty()) {
      drawn.push_back(&rec);
    }
  }
  if (drawn.empty()) {
    throw UsageError("profile: no plan with a velocity profile");
  }
  const ProfileAxes ax = profile_axes(records, options);
  Image img(options.width, options.height);
  const Rgb ink = gray(0);
  const Rgb rule = gray(225);

  const double s_step = nice_step(ax.s_max / 5.0);
  const double v_step = nice_step(ax.v_max / 5.0);
  for (double s = 0.0; s <= ax.s_max + 1e-9; s += s_step) {
    const int x = ax.x_of(s);
    draw_line(img, x, ax.top, x, ax.bottom, rule);
    draw_line(img, x, ax.bottom, x, ax.bottom + 4, ink);
    const std::string label = tick_label(s);
    draw_text(img, x - text_width(label) / 2, ax.bottom + 7, label, ink);
  }
  for (double v = 0.0; v <= ax.v_max + 1e-9; v += v_step) {
    const int y = ax.y_of(v);
    draw_line(img, ax.left, y, ax.right, y, rule);
    draw_line(img, ax.left - 4, y, ax.left, y, ink);
    const std::string label = tick_label(v);
    draw_text(img, ax.left - 7 - text_width(label), y - 3, label, ink);
  }
  draw_line(img, ax.left, ax.top, ax.left, ax.bottom, ink);
  draw_line(img, ax.left, ax.bottom, ax.right, ax.bottom, ink);
  draw_text(img, (ax.left + ax.right - text_width("s [m]")) / 2, ax.bottom + 20, "s [m]", ink);
  draw_text(img, 4, 6, "v [m/s]", ink);

  for (const auto * rec : drawn) {
    const auto & p = rec->result.profile;
    const Rgb c = planner_color(rec->kind);
    const std::size_t n = std::min(p.v.size(), p.s.size());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int x0 = ax.x_of(p.s[i]);
      const int y0 = ax.y_of(p.v[i]);
      const int x1 = ax.x_of(p.s[i + 1]);
      const int y1 = ax.y_of(p.v[i + 1]);
      draw_line(img, x0, y0, x1, y1, c);
      draw_line(img, x0, y0 + 1, x1, y1 + 1, c);
    }
    if (n == 1) {
      img.set(ax.x_of(p.s[0]), ax.y_of(p.v[0]), c);
    }
  }

  int y = ax.top;
  const int x = ax.right + 14;
  for (const auto * rec : drawn) {
    fill_rect(img, x, y + 2, x + 15, y + 4, planner_color(rec->kind));
    draw_text(img, x + 20, y, to_string(rec->kind), ink);
    y += 14;
  }
  return img;
}

}  // namespace occrisk
