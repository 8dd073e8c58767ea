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

#include "occrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace occrisk
{

namespace
{

std::string fixed(double v, int digits = 6)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

double time_to_collision(
  const Vec2 & p_ego, const Vec2 & v_ego, const Vec2 & p_agent, const Vec2 & v_agent,
  double radius, double cap)
{
  const Vec2 p = p_agent - p_ego;
  const Vec2 v = v_agent - v_ego;
  const double c = dot(p, p) - radius * radius;
  if (c <= 0.0) {
    return 0.0;
  }
  const double a = dot(v, v);
  const double b = dot(p, v);
  if (a <= 0.0 || b >= 0.0) {
    return cap;
  }
  const double disc = b * b - a * c;
  if (disc < 0.0) {
    return cap;
  }
  // Numerically stable smaller root of a tau^2 + 2 b tau + c = 0 with b < 0.
  const double tau = c / (-b + std::sqrt(disc));
  return std::min(tau, cap);
}

TtcMatrix ttc_matrix(const TtcBody & ego, const std::vector<TtcBody> & agents, double cap)
{
  TtcMatrix m;
  m.cap = cap;
  m.steps = ego.states.size();
  m.agents = agents.size();
  m.values.assign(m.steps * m.agents, cap);
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const auto & a = agents[k];
    const std::size_t n = std::min(m.steps, a.states.size());
    for (std::size_t t = 0; t < n; ++t) {
      const auto & e = ego.states[t];
      const auto & s = a.states[t];
      m.values[t * m.agents + k] = time_to_collision(
        e.position(), e.velocity(), s.position(), s.velocity(), ego.radius + a.radius, cap);
    }
  }
  return m;
}

double ttc_min(const TtcMatrix & m)
{
  if (m.values.empty()) {
    return m.cap;
  }
  return *std::min_element(m.values.begin(), m.values.end());
}

double ttc_avg(const TtcMatrix & m)
{
  if (m.values.empty()) {
    return m.cap;
  }
  double sum = 0.0;
  for (const double v : m.values) {
    sum += v;
  }
  return sum / static_cast<double>(m.values.size());
}

int critical_moments(const TtcMatrix & m, double threshold)
{
  int count = 0;
  for (std::size_t t = 0; t < m.steps; ++t) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.agents; ++k) {
      lo = std::min(lo, m.at(t, k));
    }
    if (lo < threshold) {
      ++count;
    }
  }
  return count;
}

double risk_score(
  const std::vector<Vec2> & positions, const std::vector<double> & speeds, double dt,
  const std::function<double(const Vec2 &)> & risk)
{
  double sum = 0.0;
  const std::size_t n = std::min(positions.size(), speeds.size());
  for (std::size_t i = 0; i < n; ++i) {
    sum += risk(positions[i]) * speeds[i] * dt;
  }
  return sum;
}

double risk_score(
  const std::vector<Vec2> & positions, const std::vector<double> & speeds, double dt,
  const RiskGrid & grid)
{
  return risk_score(
    positions, speeds, dt, [&grid](const Vec2 & p) { return risk_at(grid, p); });
}

TtcBody body_from_trajectory(const Trajectory & traj, const Footprint & footprint)
{
  return {traj.agent_id, traj.states, footprint_radius(footprint)};
}

std::vector<TtcBody> logged_bodies(const Scenario & scenario)
{
  std::vector<TtcBody> out;
  for (const auto & agent : scenario.agents) {
    if (agent.kind == AgentKind::phantom) {
      continue;
    }
    TtcBody b;
    b.id = agent.id;
    b.radius = footprint_radius(agent.footprint);
    for (const auto & s : agent.states) {
      b.states.push_back(s.kinematic());
    }
    out.push_back(std::move(b));
  }
  return out;
}

GenerationMetrics generation_metrics(
  const Scenario & scenario, const std::vector<Trajectory> & generated,
  const std::vector<TtcBody> & scene_agents, const MetricParams & params)
{
  GenerationMetrics g;
  TtcBody ego{"ego", ego_log_states(scenario), footprint_radius(scenario.ego.footprint)};
  g.ttc = ttc_min(ttc_matrix(ego, scene_agents, params.ttc_cap));

  std::size_t total = 0;
  std::size_t on = 0;
  double off_sum = 0.0;
  for (const auto & traj : generated) {
    for (const auto & s : traj.states) {
      const double d = road_sdf(s.position(), scenario.lanes);
      ++total;
      if (d <= 0.0) {
        ++on;
      } else {
        off_sum += d;
      }
    }
  }
  if (total > 0) {
    g.onroad_rate = static_cast<double>(on) / static_cast<double>(total);
    g.offroad_dist = total > on ? off_sum / static_cast<double>(total - on) : 0.0;
  }

  const auto & path = scenario.ego.reference_path;
  for (const auto & body : scene_agents) {
    if (body.states.empty()) {
      continue;
    }
    const auto * agent = scenario.find_agent(body.id);
    const bool phantom = agent == nullptr || agent->kind == AgentKind::phantom;
    if (!phantom && body.states.front().speed < params.v_min) {
      continue;
    }
    double d = std::numeric_limits<double>::infinity();
    for (const auto & s : body.states) {
      d = std::min(d, path.distance_to(s.position()));
    }
    if (d < params.interaction_radius) {
      ++g.interaction_agents;
    }
  }
  return g;
}

std::string format_eval_report(const std::vector<EvalRow> & rows)
{
  std::ostringstream os;
  os << "scenario,planner,ttc_min,ttc_avg,risk_score,critical_moments,onroad_rate,offroad_dist,"
        "interaction_agents,error\n";
  double sums[7] = {0, 0, 0, 0, 0, 0, 0};
  int n = 0;
  for (const auto & r : rows) {
    os << r.scenario << ',' << r.planner << ',';
    if (!r.error.empty()) {
      os << ",,,,,,," << r.error << '\n';
      continue;
    }
    os << fixed(r.ttc_min) << ',' << fixed(r.ttc_avg) << ',' << fixed(r.risk_score) << ','
       << r.critical_moments << ',' << fixed(r.onroad_rate) << ',' << fixed(r.offroad_dist) << ','
       << r.interaction_agents << ",\n";
    sums[0] += r.ttc_min;
    sums[1] += r.ttc_avg;
    sums[2] += r.risk_score;
    sums[3] += r.critical_moments;
    sums[4] += r.onroad_rate;
    sums[5] += r.offroad_dist;
    sums[6] += r.interaction_agents;
    ++n;
  }
  os << "mean,all";
  for (const double s : sums) {
    os << ',' << (n > 0 ? fixed(s / n) : std::string());
  }
  os << ",\n";
  return os.str();
}

}  // namespace occrisk
