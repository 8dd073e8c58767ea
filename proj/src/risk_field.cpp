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

#include "occrisk/risk_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "occrisk/errors.hpp"
#include "occrisk/scenario_io.hpp"

namespace occrisk
{

namespace
{

struct WeightedPoint
{
  Vec2 p;
  double t;
  double weight;
};

double discount(double factor, double t) { return factor == 1.0 ? 1.0 : std::pow(factor, t); }

int bin_of(double t, const RiskParams & params)
{
  const int b = static_cast<int>(std::floor(t / params.bin_width));
  return std::clamp(b, 0, params.bin_count - 1);
}

void deposit(
  const GridSpec & spec, double decay, const WeightedPoint & wp, std::vector<double> & layer,
  std::size_t & dropped)
{
  const auto cell = spec.cell_of(wp.p);
  if (!cell) {
    ++dropped;
    return;
  }
  const double d = distance(wp.p, spec.center(cell->first, cell->second));
  layer[spec.index(cell->first, cell->second)] += wp.weight * std::exp(-decay * d);
}

std::vector<const Trajectory *> ordered_modes(const std::vector<Trajectory> & modes)
{
  std::vector<const Trajectory *> out;
  out.reserve(modes.size());
  for (const auto & m : modes) {
    out.push_back(&m);
  }
  std::stable_sort(out.begin(), out.end(), [](const Trajectory * a, const Trajectory * b) {
    return a->mode_id < b->mode_id;
  });
  return out;
}

std::vector<WeightedPoint> flow_points(
  const TrajectorySet & trajectories, const std::set<std::string> & active, double time_discount)
{
  std::vector<WeightedPoint> pts;
  for (const auto & [id, modes] : trajectories) {
    if (!active.count(id)) {
      continue;
    }
    for (const Trajectory * traj : ordered_modes(modes)) {
      for (std::size_t k = 0; k < traj->states.size(); ++k) {
        const double t = traj->dt * static_cast<double>(k);
        pts.push_back({traj->states[k].position(), t, discount(time_discount, t)});
      }
    }
  }
  return pts;
}

std::vector<WeightedPoint> event_points(
  const std::vector<CollisionEvent> & events, double time_discount)
{
  std::vector<const CollisionEvent *> order;
  order.reserve(events.size());
  for (const auto & e : events) {
    order.push_back(&e);
  }
  std::sort(order.begin(), order.end(), [](const CollisionEvent * a, const CollisionEvent * b) {
    return std::tie(a->agent_id, a->mode, a->t, a->x, a->y) <
           std::tie(b->agent_id, b->mode, b->t, b->x, b->y);
  });
  std::vector<WeightedPoint> pts;
  pts.reserve(order.size());
  for (const auto * e : order) {
    pts.push_back({{e->x, e->y}, e->t, discount(time_discount, e->t)});
  }
  return pts;
}

void normalize(std::vector<double> & values)
{
  const double m = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (m > 0.0) {
    for (auto & v : values) {
      v /= m;
    }
  }
}

void put_f32(std::ostream & os, double value)
{
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  const char bytes[4] = {
    static_cast<char>(bits & 0xffU), static_cast<char>((bits >> 8) & 0xffU),
    static_cast<char>((bits >> 16) & 0xffU), static_cast<char>((bits >> 24) & 0xffU)};
  os.write(bytes, 4);
}

double get_f32(std::istream & is)
{
  unsigned char bytes[4];
  if (!is.read(reinterpret_cast<char *>(bytes), 4)) {
    throw FormatError("grid payload truncated");
  }
  const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                             (static_cast<std::uint32_t>(bytes[1]) << 8) |
                             (static_cast<std::uint32_t>(bytes[2]) << 16) |
                             (static_cast<std::uint32_t>(bytes[3]) << 24);
  return static_cast<double>(std::bit_cast<float>(bits));
}

}  // namespace

std::optional<std::pair<int, int>> GridSpec::cell_of(const Vec2 & p) const
{
  const double fx = std::floor((p.x - origin.x) / resolution);
  const double fy = std::floor((p.y - origin.y) / resolution);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < n1 && fy < n2)) {
    return std::nullopt;
  }
  return std::make_pair(static_cast<int>(fx), static_cast<int>(fy));
}

GridSpec make_grid_spec(const Scenario & scenario, double resolution, double margin)
{
  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  auto grow = [&](const Vec2 & p) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  };
  for (const auto & lane : scenario.lanes) {
    for (const auto & p : lane.centerline.points()) {
      grow(p);
    }
  }
  for (const auto & agent : scenario.agents) {
    for (const auto & s : agent.states) {
      grow(s.position());
    }
  }
  for (const auto & p : scenario.ego.reference_path.points()) {
    grow(p);
  }
  for (const auto & s : scenario.ego.log) {
    grow(s.position());
  }
  grow(scenario.ego.initial.position());
  for (const auto & poly : scenario.occluders) {
    for (const auto & p : poly) {
      grow(p);
    }
  }
  GridSpec spec;
  spec.resolution = resolution;
  spec.origin = {lo_x - margin, lo_y - margin};
  spec.n1 = std::max(1, static_cast<int>(std::ceil((hi_x - lo_x + 2.0 * margin) / resolution)));
  spec.n2 = std::max(1, static_cast<int>(std::ceil((hi_y - lo_y + 2.0 * margin) / resolution)));
  return spec;
}

Layer flow_risk(
  const TrajectorySet & trajectories, const std::set<std::string> & active, const GridSpec & spec,
  double decay, double time_discount)
{
  Layer layer;
  layer.values.assign(spec.size(), 0.0);
  for (const auto & wp : flow_points(trajectories, active, time_discount)) {
    deposit(spec, decay, wp, layer.values, layer.dropped_points);
  }
  return layer;
}

std::vector<CollisionEvent> collision_events(
  const std::vector<KinematicState> & ego, const TrajectorySet & trajectories, double delta,
  double dt)
{
  std::vector<CollisionEvent> events;
  for (const auto & [id, modes] : trajectories) {
    for (const Trajectory * traj : ordered_modes(modes)) {
      const std::size_t n = std::min(ego.size(), traj->states.size());
      for (std::size_t k = 0; k < n; ++k) {
        const auto & a = traj->states[k];
        if (distance(ego[k].position(), a.position()) < delta) {
          events.push_back({dt * static_cast<double>(k), a.x, a.y, id, traj->mode_id});
        }
      }
    }
  }
  return events;
}

Layer collision_risk(
  const std::vector<CollisionEvent> & events, const GridSpec & spec, double decay,
  double time_discount)
{
  Layer layer;
  layer.values.assign(spec.size(), 0.0);
  for (const auto & wp : event_points(events, time_discount)) {
    deposit(spec, decay, wp, layer.values, layer.dropped_points);
  }
  return layer;
}

std::vector<double> gaussian_blur(
  const std::vector<double> & values, int n1, int n2, double sigma_cells)
{
  if (sigma_cells <= 0.0) {
    return values;
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_cells));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * k * k / (sigma_cells * sigma_cells));
    kernel[static_cast<std::size_t>(k + radius)] = w;
    sum += w;
  }
  for (auto & w : kernel) {
    w /= sum;
  }
  auto at = [n1](int i, int j) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(i);
  };
  std::vector<double> tmp(values.size(), 0.0);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      double acc = 0.0;
      for (int k = std::max(-radius, -i); k <= std::min(radius, n1 - 1 - i); ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] * values[at(i + k, j)];
      }
      tmp[at(i, j)] = acc;
    }
  }
  std::vector<double> out(values.size(), 0.0);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      double acc = 0.0;
      for (int k = std::max(-radius, -j); k <= std::min(radius, n2 - 1 - j); ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[at(i, j + k)];
      }
      out[at(i, j)] = acc;
    }
  }
  return out;
}

std::vector<double> fuse_and_finish(
  const std::vector<double> & flow, const std::vector<double> & collision, int n1, int n2,
  double alpha, double beta, double sigma_cells)
{
  std::vector<double> total(flow.size());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    total[i] = alpha * flow[i] + beta * collision[i];
  }
  total = gaussian_blur(total, n1, n2, sigma_cells);
  normalize(total);
  return total;
}

RiskGrid build_risk_grid(
  const GridSpec & spec, const TrajectorySet & trajectories, const std::set<std::string> & active,
  const std::vector<KinematicState> & ego, double dt, const RiskParams & params)
{
  RiskGrid grid;
  grid.spec = spec;
  grid.params = params;
  auto flow = flow_risk(trajectories, active, spec, params.decay, params.time_discount);
  TrajectorySet active_set;
  for (const auto & [id, modes] : trajectories) {
    if (active.count(id)) {
      active_set.emplace(id, modes);
    }
  }
  const auto events = collision_events(ego, active_set, params.delta, dt);
  auto collision = collision_risk(events, spec, params.decay, params.time_discount);
  grid.dropped_points = flow.dropped_points + collision.dropped_points;
  grid.event_count = events.size();
  grid.total = fuse_and_finish(
    flow.values, collision.values, spec.n1, spec.n2, params.alpha, params.beta,
    params.sigma_cells);
  grid.flow = std::move(flow.values);
  grid.collision = std::move(collision.values);

  if (params.time_bins && params.bin_count > 0) {
    const auto nb = static_cast<std::size_t>(params.bin_count);
    std::vector<std::vector<double>> fb(nb, std::vector<double>(spec.size(), 0.0));
    std::vector<std::vector<double>> cb = fb;
    std::size_t ignored = 0;
    for (const auto & wp : flow_points(trajectories, active, params.time_discount)) {
      deposit(spec, params.decay, wp, fb[static_cast<std::size_t>(bin_of(wp.t, params))], ignored);
    }
    for (const auto & wp : event_points(events, params.time_discount)) {
      deposit(spec, params.decay, wp, cb[static_cast<std::size_t>(bin_of(wp.t, params))], ignored);
    }
    double peak = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      std::vector<double> fused(spec.size());
      for (std::size_t i = 0; i < fused.size(); ++i) {
        fused[i] = params.alpha * fb[b][i] + params.beta * cb[b][i];
      }
      fused = gaussian_blur(fused, spec.n1, spec.n2, params.sigma_cells);
      for (const double v : fused) {
        peak = std::max(peak, v);
      }
      grid.bins.push_back(std::move(fused));
    }
    if (peak > 0.0) {
      for (auto & bin : grid.bins) {
        for (auto & v : bin) {
          v /= peak;
        }
      }
    }
  }
  return grid;
}

double sample_layer(const GridSpec & spec, const std::vector<double> & layer, const Vec2 & p)
{
  if (!spec.cell_of(p)) {
    return 0.0;
  }
  const double u = std::clamp((p.x - spec.origin.x) / spec.resolution - 0.5, 0.0, spec.n1 - 1.0);
  const double v = std::clamp((p.y - spec.origin.y) / spec.resolution - 0.5, 0.0, spec.n2 - 1.0);
  const int i0 = std::min(static_cast<int>(std::floor(u)), std::max(spec.n1 - 2, 0));
  const int j0 = std::min(static_cast<int>(std::floor(v)), std::max(spec.n2 - 2, 0));
  const int i1 = std::min(i0 + 1, spec.n1 - 1);
  const int j1 = std::min(j0 + 1, spec.n2 - 1);
  const double fx = u - i0;
  const double fy = v - j0;
  const double a = layer[spec.index(i0, j0)];
  const double b = layer[spec.index(i1, j0)];
  const double c = layer[spec.index(i0, j1)];
  const double d = layer[spec.index(i1, j1)];
  return (1.0 - fy) * ((1.0 - fx) * a + fx * b) + fy * ((1.0 - fx) * c + fx * d);
}

double risk_at(const RiskGrid & grid, const Vec2 & p)
{
  return sample_layer(grid.spec, grid.total, p);
}

double risk_at(const RiskGrid & grid, const Vec2 & p, double t)
{
  if (grid.bins.empty()) {
    return risk_at(grid, p);
  }
  return sample_layer(grid.spec, grid.bins[static_cast<std::size_t>(bin_of(t, grid.params))], p);
}

namespace
{

double smooth(
  const std::vector<Anchor> & anchors, const std::vector<double> & risk, double sigma, double s,
  double * derivative)
{
  double w_sum = 0.0;
  double wr_sum = 0.0;
  double dw_sum = 0.0;
  double dwr_sum = 0.0;
  // Shifted exponent keeps the weights finite far from every anchor.
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto & a : anchors) {
    nearest = std::min(nearest, std::abs(s - a.s));
  }
  const double shift = 0.5 * nearest * nearest / (sigma * sigma);
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const double z = (s - anchors[k].s) / sigma;
    const double w = std::exp(-0.5 * z * z + shift);
    const double dw = -z / sigma * w;
    w_sum += w;
    wr_sum += w * risk[k];
    dw_sum += dw;
    dwr_sum += dw * risk[k];
  }
  const double value = wr_sum / w_sum;
  if (derivative != nullptr) {
    *derivative = (dwr_sum - value * dw_sum) / w_sum;
  }
  return value;
}

}  // namespace

double AnchorRisk::value(double s) const { return smooth(anchors, risk, smoothing, s, nullptr); }

double AnchorRisk::derivative(double s) const
{
  double d = 0.0;
  smooth(anchors, risk, smoothing, s, &d);
  return d;
}

double AnchorRisk::value(double s, double t) const
{
  if (bin_risk.empty()) {
    return value(s);
  }
  const int b = std::clamp(
    static_cast<int>(std::floor(t / bin_width)), 0, static_cast<int>(bin_risk.size()) - 1);
  return smooth(anchors, bin_risk[static_cast<std::size_t>(b)], smoothing, s, nullptr);
}

double AnchorRisk::derivative(double s, double t) const
{
  if (bin_risk.empty()) {
    return derivative(s);
  }
  const int b = std::clamp(
    static_cast<int>(std::floor(t / bin_width)), 0, static_cast<int>(bin_risk.size()) - 1);
  double d = 0.0;
  smooth(anchors, bin_risk[static_cast<std::size_t>(b)], smoothing, s, &d);
  return d;
}

AnchorRisk anchor_risks(
  const RiskGrid & grid, const Polyline & path, int count, double s_begin,
  std::optional<double> s_end, double speed)
{
  const double end = std::min(s_end.value_or(path.length()), path.length());
  const double span = end - s_begin;
  if (count < 2 || span < count * grid.spec.resolution) {
    throw PathTooShort(
      "anchor span of " + std::to_string(span) + " m is shorter than " + std::to_string(count) +
      " cells");
  }
  AnchorRisk out;
  out.smoothing = span / count;
  out.bin_width = grid.params.bin_width;
  out.bin_risk.assign(grid.bins.size(), {});
  for (int k = 0; k < count; ++k) {
    Anchor a;
    a.s = s_begin + span * k / (count - 1);
    a.point = path.point_at(a.s);
    a.arrival = speed > 0.0 ? (a.s - s_begin) / speed : std::numeric_limits<double>::infinity();
    out.anchors.push_back(a);
    out.risk.push_back(risk_at(grid, a.point));
    for (std::size_t b = 0; b < grid.bins.size(); ++b) {
      out.bin_risk[b].push_back(sample_layer(grid.spec, grid.bins[b], a.point));
    }
  }
  return out;
}

void write_grid(const std::string & path, const RiskGrid & grid)
{
  nlohmann::ordered_json header;
  header["format"] = "occrisk-grid";
  header["version"] = 1;
  header["origin"] = {grid.spec.origin.x, grid.spec.origin.y};
  header["resolution"] = grid.spec.resolution;
  header["n1"] = grid.spec.n1;
  header["n2"] = grid.spec.n2;
  header["decay"] = grid.params.decay;
  header["delta"] = grid.params.delta;
  header["alpha"] = grid.params.alpha;
  header["beta"] = grid.params.beta;
  header["sigma_cells"] = grid.params.sigma_cells;
  header["bin_width"] = grid.params.bin_width;
  header["dropped_points"] = grid.dropped_points;
  header["event_count"] = grid.event_count;
  std::vector<std::string> layers{"flow", "collision", "total"};
  for (std::size_t b = 0; b < grid.bins.size(); ++b) {
    layers.push_back("total_t" + std::to_string(b));
  }
  header["layers"] = layers;
  header["encoding"] = "float32-le";

  std::ostringstream os;
  os << header.dump() << '\n';
  auto dump = [&](const std::vector<double> & layer) {
    for (const double v : layer) {
      put_f32(os, v);
    }
  };
  dump(grid.flow);
  dump(grid.collision);
  dump(grid.total);
  for (const auto & bin : grid.bins) {
    dump(bin);
  }
  write_text_file(path, os.str());
}

RiskGrid read_grid(const std::string & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw FormatError("cannot open grid file " + path);
  }
  std::string line;
  std::getline(is, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception & e) {
    throw FormatError("grid header: " + std::string(e.what()));
  }
  if (header.value("format", "") != "occrisk-grid") {
    throw FormatError("not a grid file: " + path);
  }
  RiskGrid grid;
  try {
    const auto & origin = header.at("origin");
    grid.spec.origin = {origin.at(0).get<double>(), origin.at(1).get<double>()};
    grid.spec.resolution = header.at("resolution").get<double>();
    grid.spec.n1 = header.at("n1").get<int>();
    grid.spec.n2 = header.at("n2").get<int>();
    grid.params.decay = header.at("decay").get<double>();
    grid.params.delta = header.at("delta").get<double>();
    grid.params.alpha = header.at("alpha").get<double>();
    grid.params.beta = header.at("beta").get<double>();
    grid.params.sigma_cells = header.at("sigma_cells").get<double>();
    grid.params.bin_width = header.at("bin_width").get<double>();
    grid.params.resolution = grid.spec.resolution;
    grid.dropped_points = header.at("dropped_points").get<std::size_t>();
    grid.event_count = header.at("event_count").get<std::size_t>();
  } catch (const nlohmann::json::exception & e) {
    throw FormatError("grid header: " + std::string(e.what()));
  }
  const auto layers = header.at("layers").get<std::vector<std::string>>();
  for (const auto & name : layers) {
    std::vector<double> values(grid.spec.size());
    for (auto & v : values) {
      v = get_f32(is);
    }
    if (name == "flow") {
      grid.flow = std::move(values);
    } else if (name == "collision") {
      grid.collision = std::move(values);
    } else if (name == "total") {
      grid.total = std::move(values);
    } else {
      grid.bins.push_back(std::move(values));
    }
  }
  grid.params.time_bins = !grid.bins.empty();
  if (!grid.bins.empty()) {
    grid.params.bin_count = static_cast<int>(grid.bins.size());
  }
  return grid;
}

void write_pgm(const std::string & path, const GridSpec & spec, const std::vector<double> & layer)
{
  std::ostringstream os;
  os << "P2\n" << spec.n1 << ' ' << spec.n2 << "\n255\n";
  for (int j = spec.n2 - 1; j >= 0; --j) {
    for (int i = 0; i < spec.n1; ++i) {
      const double v = std::clamp(layer[spec.index(i, j)], 0.0, 1.0);
      os << static_cast<int>(std::lround(v * 255.0)) << (i + 1 < spec.n1 ? ' ' : '\n');
    }
  }
  write_text_file(path, os.str());
}

}  // namespace occrisk
