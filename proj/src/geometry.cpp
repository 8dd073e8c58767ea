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

#include "occrisk/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace occrisk
{

double wrap_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, two_pi);
  if (a < 0.0) {
    a += two_pi;
  }
  return a - std::numbers::pi;
}

double closest_segment_parameter(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) {
    return 0.0;
  }
  return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const double t = closest_segment_parameter(p, a, b);
  return distance(p, a + (b - a) * t);
}

std::optional<double> ray_segment_range(
  const Vec2 & origin, const Vec2 & dir, const Vec2 & a, const Vec2 & b)
{
  const Vec2 e = b - a;
  const double denom = cross(dir, e);
  const Vec2 w = a - origin;
  if (std::abs(denom) < 1e-15) {
    return std::nullopt;
  }
  const double t = cross(w, e) / denom;
  const double u = cross(w, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) {
    return std::nullopt;
  }
  return t;
}

std::optional<double> segment_intersection(
  const Vec2 & p0, const Vec2 & p1, const Vec2 & q0, const Vec2 & q1)
{
  const Vec2 r = p1 - p0;
  const Vec2 e = q1 - q0;
  const double denom = cross(r, e);
  if (std::abs(denom) < 1e-12) {
    return std::nullopt;
  }
  const Vec2 w = q0 - p0;
  const double t = cross(w, e) / denom;
  const double u = cross(w, r) / denom;
  constexpr double eps = 1e-9;
  if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) {
    return std::nullopt;
  }
  return std::clamp(t, 0.0, 1.0);
}

bool point_in_polygon(const Vec2 & p, std::span<const Vec2> polygon)
{
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = polygon[i];
    const Vec2 & b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

bool is_convex(std::span<const Vec2> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    return false;
  }
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & a = polygon[i];
    const Vec2 & b = polygon[(i + 1) % n];
    const Vec2 & c = polygon[(i + 2) % n];
    const double z = cross(b - a, c - b);
    if (std::abs(z) < 1e-12) {
      continue;
    }
    const int s = z > 0.0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return sign != 0;
}

Polygon oriented_box(const Vec2 & center, double heading, double half_length, double half_width)
{
  const Vec2 f = unit_from_angle(heading) * half_length;
  const Vec2 l = unit_from_angle(heading + std::numbers::pi / 2.0) * half_width;
  return {center - f - l, center + f - l, center + f + l, center - f + l};
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points))
{
  s_.reserve(points_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0) {
      acc += distance(points_[i - 1], points_[i]);
    }
    s_.push_back(acc);
  }
}

std::size_t Polyline::segment_index(double s) const
{
  if (points_.size() < 2) {
    return 0;
  }
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(s_.begin(), it));
  if (idx == 0) {
    return 0;
  }
  return std::min(idx - 1, points_.size() - 2);
}

Vec2 Polyline::point_at(double s) const
{
  if (points_.empty()) {
    throw std::logic_error("point_at on empty polyline");
  }
  if (points_.size() == 1) {
    return points_.front();
  }
  const std::size_t i = segment_index(s);
  const double seg_len = s_[i + 1] - s_[i];
  const double t = seg_len > 0.0 ? (s - s_[i]) / seg_len : 0.0;
  return points_[i] + (points_[i + 1] - points_[i]) * std::clamp(t, 0.0, 1.0);
}

double Polyline::heading_at(double s) const
{
  if (points_.size() < 2) {
    return 0.0;
  }
  const std::size_t i = segment_index(s);
  const Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

PathProjection Polyline::project(const Vec2 & p) const
{
  PathProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (points_.size() == 1) {
    best.distance = distance(p, points_.front());
    return best;
  }
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 & a = points_[i];
    const Vec2 & b = points_[i + 1];
    const double t = closest_segment_parameter(p, a, b);
    const Vec2 foot = a + (b - a) * t;
    const double d = distance(p, foot);
    if (d < best.distance) {
      best.distance = d;
      best.segment = i;
      best.s = s_[i] + t * (s_[i + 1] - s_[i]);
      const double side = cross(b - a, p - a);
      best.lateral = side >= 0.0 ? d : -d;
    }
  }
  return best;
}

double Polyline::distance_to(const Vec2 & p) const
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    best = std::min(best, point_segment_distance(p, points_[i], points_[i + 1]));
  }
  if (points_.size() == 1) {
    best = distance(p, points_.front());
  }
  return best;
}

Polyline Polyline::slice(double s0, double s1) const
{
  s0 = std::clamp(s0, 0.0, length());
  s1 = std::clamp(s1, s0, length());
  std::vector<Vec2> out{point_at(s0)};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (s_[i] > s0 && s_[i] < s1) {
      out.push_back(points_[i]);
    }
  }
  const Vec2 end = point_at(s1);
  if (distance(end, out.back()) > 1e-9) {
    out.push_back(end);
  }
  return Polyline(std::move(out));
}

Polyline Polyline::extended(double extra) const
{
  if (points_.size() < 2 || extra <= 0.0) {
    return *this;
  }
  std::vector<Vec2> out = points_;
  out.push_back(points_.back() + unit_from_angle(heading_at(length())) * extra);
  return Polyline(std::move(out));
}

}  // namespace occrisk
