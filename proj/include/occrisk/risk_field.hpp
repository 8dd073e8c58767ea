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

#ifndef OCCRISK__RISK_FIELD_HPP_
#define OCCRISK__RISK_FIELD_HPP_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "occrisk/geometry.hpp"
#include "occrisk/scene.hpp"
#include "occrisk/trajgen.hpp"

namespace occrisk
{

/// Axis-aligned raster. Cell (i, j) spans [origin + (i, j) * resolution, + resolution); values
/// are stored row-major with j (the y index) as the row: index = j * n1 + i.
struct GridSpec
{
  Vec2 origin;
  double resolution{0.5};
  int n1{0};
  int n2{0};

  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const
  {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(i);
  }
  Vec2 center(int i, int j) const
  {
    return {origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution};
  }
  /// Containing cell, or nullopt outside the raster.
  std::optional<std::pair<int, int>> cell_of(const Vec2 & p) const;
};

/// Bounding box of lanes, agents, ego path and log, and occluders, grown by `margin`.
GridSpec make_grid_spec(const Scenario & scenario, double resolution = 0.5, double margin = 10.0);

struct RiskParams
{
  double decay{2.0};
  double delta{3.0};
  double alpha{0.4};
  double beta{0.6};
  double sigma_cells{2.0};
  double resolution{0.5};
  double margin{10.0};
  /// Per-second weight multiplier; 1.0 weights every timestep equally.
  double time_discount{1.0};
  bool time_bins{false};
  int bin_count{8};
  double bin_width{1.0};
};

struct Layer
{
  std::vector<double> values;
  std::size_t dropped_points{0};
};

/// Adds exp(-decay * D) to the containing cell of every point of every active trajectory,
/// D being the point-to-cell-center distance. Accumulation runs in (agent, mode, t) order
/// whatever order the input holds.
Layer flow_risk(
  const TrajectorySet & trajectories, const std::set<std::string> & active, const GridSpec & spec,
  double decay, double time_discount = 1.0);

struct CollisionEvent
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  std::string agent_id;
  int mode{0};
};

/// Every (t, agent, mode) whose centroid lies closer than delta to the ego at t, located at
/// the agent's position.
std::vector<CollisionEvent> collision_events(
  const std::vector<KinematicState> & ego, const TrajectorySet & trajectories, double delta,
  double dt);

Layer collision_risk(
  const std::vector<CollisionEvent> & events, const GridSpec & spec, double decay,
  double time_discount = 1.0);

/// Separable Gaussian blur truncated at 3 sigma with a normalized kernel and zero padding.
std::vector<double> gaussian_blur(
  const std::vector<double> & values, int n1, int n2, double sigma_cells);

/// alpha * flow + beta * collision, blurred, then divided by its maximum (zeros stay zeros).
std::vector<double> fuse_and_finish(
  const std::vector<double> & flow, const std::vector<double> & collision, int n1, int n2,
  double alpha, double beta, double sigma_cells);

struct RiskGrid
{
  GridSpec spec;
  RiskParams params;
  std::vector<double> flow;
  std::vector<double> collision;
  std::vector<double> total;
  /// Per-time-bin totals, normalized by the common maximum; empty unless params.time_bins.
  std::vector<std::vector<double>> bins;
  std::size_t dropped_points{0};
  std::size_t event_count{0};
};

RiskGrid build_risk_grid(
  const GridSpec & spec, const TrajectorySet & trajectories, const std::set<std::string> & active,
  const std::vector<KinematicState> & ego, double dt, const RiskParams & params);

/// Bilinear interpolation over cell centers of `layer`, clamped to the edge centers inside the
/// raster; zero outside it.
double sample_layer(const GridSpec & spec, const std::vector<double> & layer, const Vec2 & p);
double risk_at(const RiskGrid & grid, const Vec2 & p);
/// Time-resolved lookup; falls back to the collapsed field when no bins were built.
double risk_at(const RiskGrid & grid, const Vec2 & p, double t);

struct Anchor
{
  double s{0.0};
  Vec2 point;
  double arrival{0.0};
};

/// Lane-anchor risk along a path, with a Gaussian-smoothed risk-vs-arc-length curve.
struct AnchorRisk
{
  std::vector<Anchor> anchors;
  std::vector<double> risk;
  /// Per-bin anchor risk when the grid carries time bins.
  std::vector<std::vector<double>> bin_risk;
  double bin_width{1.0};
  double smoothing{1.0};

  /// Smoothed risk at arc length s (Nadaraya-Watson over anchors).
  double value(double s) const;
  double derivative(double s) const;
  /// Smoothed risk at (s, t), using the time bin containing t when available.
  double value(double s, double t) const;
  double derivative(double s, double t) const;
};

/// `count` anchors uniformly spaced over [s_begin, s_end] of `path` (whole path by default).
/// Arrival times follow `speed` (constant) from s_begin. Throws PathTooShort when the span is
/// shorter than count * resolution.
AnchorRisk anchor_risks(
  const RiskGrid & grid, const Polyline & path, int count = 20, double s_begin = 0.0,
  std::optional<double> s_end = std::nullopt, double speed = 0.0);

/// Header line (JSON) followed by little-endian float32 row-major payloads, one per layer.
void write_grid(const std::string & path, const RiskGrid & grid);
RiskGrid read_grid(const std::string & path);
/// ASCII graymap (P2, maxval 255) of a [0, 1] layer, top row = largest y.
void write_pgm(const std::string & path, const GridSpec & spec, const std::vector<double> & layer);

}  // namespace occrisk

#endif  // OCCRISK__RISK_FIELD_HPP_
