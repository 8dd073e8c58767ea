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

#ifndef OCCRISK__GEOMETRY_HPP_
#define OCCRISK__GEOMETRY_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace occrisk
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator/(double k) const { return {x / k, y / k}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2 & operator+=(const Vec2 & o)
  {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr Vec2 operator*(double k, const Vec2 & v) { return v * k; }
constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 & a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2 & a, const Vec2 & b) { return norm(a - b); }
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 rotate(const Vec2 & v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into [-pi, pi).
double wrap_angle(double angle);

/// Closest point on segment [a, b] to p, as the clamped segment parameter in [0, 1].
double closest_segment_parameter(const Vec2 & p, const Vec2 & a, const Vec2 & b);
double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b);

/// Range along a ray (origin + t * dir, |dir| = 1) to segment [a, b], if it hits.
std::optional<double> ray_segment_range(
  const Vec2 & origin, const Vec2 & dir, const Vec2 & a, const Vec2 & b);

/// Proper or touching intersection of two segments, reported as the parameter along [p0, p1].
std::optional<double> segment_intersection(
  const Vec2 & p0, const Vec2 & p1, const Vec2 & q0, const Vec2 & q1);

using Polygon = std::vector<Vec2>;

bool point_in_polygon(const Vec2 & p, std::span<const Vec2> polygon);
bool is_convex(std::span<const Vec2> polygon);

/// Corners of an oriented box, counter-clockwise.
Polygon oriented_box(const Vec2 & center, double heading, double half_length, double half_width);

struct PathProjection
{
  double s{0.0};
  double lateral{0.0};
  double distance{0.0};
  std::size_t segment{0};
};

/// Polyline with cumulative arc length. Consecutive points must be distinct.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  const std::vector<double> & arc_lengths() const { return s_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double length() const { return s_.empty() ? 0.0 : s_.back(); }

  Vec2 point_at(double s) const;
  /// Heading of the segment containing s.
  double heading_at(double s) const;
  Vec2 tangent_at(double s) const { return unit_from_angle(heading_at(s)); }

  /// Nearest point projection; beyond the endpoints s clamps to 0 or length().
  /// The lateral offset is signed, positive to the left of travel.
  PathProjection project(const Vec2 & p) const;
  double distance_to(const Vec2 & p) const;

  /// Sub-polyline covering [s0, s1].
  Polyline slice(double s0, double s1) const;
  /// Same polyline continued straight past its end by `extra` meters.
  Polyline extended(double extra) const;

private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> s_;
};

}  // namespace occrisk

#endif  // OCCRISK__GEOMETRY_HPP_
