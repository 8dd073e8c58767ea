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

#include "occrisk/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "occrisk/errors.hpp"

namespace occrisk
{

namespace
{

struct Clearance
{
  double d{std::numeric_limits<double>::infinity()};
  /// d d / d s along the path; zero when floored.
  double slope{0.0};
};

Clearance clearance(const PlanProblem & pb, int i, double s_rel)
{
  Clearance out;
  if (pb.obstacles.empty()) {
    return out;
  }
  const double s = pb.path_offset + s_rel;
  const Vec2 p = pb.path.point_at(s);
  const Vec2 tangent = s < pb.path.length() ? pb.path.tangent_at(s) : Vec2{};
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_diff;
  double best_norm = 0.0;
  for (const auto & ob : pb.obstacles) {
    if (ob.positions.empty()) {
      continue;
    }
    const auto k = std::min(static_cast<std::size_t>(i), ob.positions.size() - 1);
    const Vec2 diff = p - ob.positions[k];
    const double n = norm(diff);
    const double raw = n - ob.radius;
    if (raw < best) {
      best = raw;
      best_diff = diff;
      best_norm = n;
    }
  }
  if (!std::isfinite(best)) {
    return out;
  }
  if (best <= 0.0) {
    out.d = 0.0;
    return out;
  }
  out.d = best;
  out.slope = best_norm > 0.0 ? dot(best_diff, tangent) / best_norm : 0.0;
  return out;
}

double risk_value(const PlanProblem & pb, double s_rel, double t)
{
  return pb.risk ? pb.risk(pb.path_offset + s_rel, t) : 0.0;
}

double limit_at(const PlanProblem & pb, double s_rel)
{
  double cap = pb.weights.v_cap;
  if (pb.speed_limit) {
    cap = std::min(cap, pb.speed_limit(pb.path_offset + s_rel));
  }
  return cap;
}

/// Projects speeds onto the feasible set by alternating forward clamping and backward braking
/// passes. Speeds only move down except where a forward pass enforces the deceleration bound.
bool repair(std::vector<double> & v, const PlanProblem & pb)
{
  const double step = pb.weights.a_max * pb.dt;
  const auto n = v.size();
  v[0] = pb.v0;
  if (pb.v0 > limit_at(pb, 0.0) || pb.v0 < 0.0) {
    return false;
  }
  for (int pass = 0; pass < 1000; ++pass) {
    bool changed = false;
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      s += v[i - 1] * pb.dt;
      const double lo = std::max(0.0, v[i - 1] - step);
      const double hi = std::min(v[i - 1] + step, limit_at(pb, s));
      const double nv = hi < lo ? std::max(hi, 0.0) : std::clamp(v[i], lo, hi);
      if (nv != v[i]) {
        v[i] = nv;
        changed = true;
      }
    }
    for (std::size_t i = n; i-- > 1;) {
      if (v[i - 1] > v[i] + step) {
        if (i - 1 == 0) {
          // v0 is fixed: brake as hard as allowed and let the next forward pass re-evaluate
          // the limits at the shortened positions.
          v[1] = v[0] - step;
        } else {
          v[i - 1] = v[i] + step;
        }
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }
  return feasible(VelocityProfile::from_speeds(v, pb.dt), pb, 1e-9);
}

struct Qp
{
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd l;
  Eigen::VectorXd u;
};

struct AdmmState
{
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  double rho{0.1};
};

/// Operator-splitting QP: min 1/2 x'Px + q'x subject to l <= Ax <= u, with over-relaxation and
/// residual-balancing step size updates.
Eigen::VectorXd solve_qp(const Qp & qp, AdmmState & st, double tol, int max_iter)
{
  const auto n = qp.P.rows();
  const auto m = qp.A.rows();
  constexpr double sigma = 1e-6;
  constexpr double relax = 1.6;
  if (st.x.size() != n) {
    st.x = Eigen::VectorXd::Zero(n);
    st.z = qp.A * st.x;
    st.y = Eigen::VectorXd::Zero(m);
  }
  st.z = st.z.cwiseMax(qp.l).cwiseMin(qp.u);
  const Eigen::MatrixXd AtA = qp.A.transpose() * qp.A;
  auto factor = [&]() {
    Eigen::MatrixXd K = qp.P + st.rho * AtA;
    K.diagonal().array() += sigma;
    return Eigen::LDLT<Eigen::MatrixXd>(K);
  };
  auto ldlt = factor();
  Eigen::VectorXd x = st.x;
  Eigen::VectorXd z = st.z;
  Eigen::VectorXd y = st.y;
  for (int k = 1; k <= max_iter; ++k) {
    const Eigen::VectorXd rhs = sigma * x - qp.q + qp.A.transpose() * (st.rho * z - y);
    const Eigen::VectorXd xt = ldlt.solve(rhs);
    const Eigen::VectorXd zt = qp.A * xt;
    x = relax * xt + (1.0 - relax) * x;
    const Eigen::VectorXd zr = relax * zt + (1.0 - relax) * z;
    const Eigen::VectorXd zn = (zr + y / st.rho).cwiseMax(qp.l).cwiseMin(qp.u);
    y += st.rho * (zr - zn);
    z = zn;
    if (k % 10 != 0) {
      continue;
    }
    const Eigen::VectorXd Ax = qp.A * x;
    const Eigen::VectorXd Px = qp.P * x;
    const Eigen::VectorXd Aty = qp.A.transpose() * y;
    const double r_prim = (Ax - z).lpNorm<Eigen::Infinity>();
    const double r_dual = (Px + qp.q + Aty).lpNorm<Eigen::Infinity>();
    const double s_prim = std::max(Ax.lpNorm<Eigen::Infinity>(), z.lpNorm<Eigen::Infinity>());
    const double s_dual = std::max(
      {Px.lpNorm<Eigen::Infinity>(), Aty.lpNorm<Eigen::Infinity>(),
       qp.q.lpNorm<Eigen::Infinity>()});
    if (r_prim <= tol * (1.0 + s_prim) && r_dual <= tol * (1.0 + s_dual)) {
      break;
    }
    if (k % 50 == 0) {
      const double ratio = std::sqrt(
        (r_prim / std::max(s_prim, 1e-12)) / std::max(r_dual / std::max(s_dual, 1e-12), 1e-30));
      if (ratio > 5.0 || ratio < 0.2) {
        st.rho = std::clamp(st.rho * ratio, 1e-6, 1e6);
        ldlt = factor();
      }
    }
  }
  st.x = x;
  st.z = z;
  st.y = y;
  return x;
}

/// Convex model of the cost around `ref` over the free speeds v_1..v_{T-1}.
Qp build_qp(const PlanProblem & pb, const VelocityProfile & ref)
{
  const int T = pb.steps;
  const int n = T - 1;
  const double dt = pb.dt;
  const auto & w = pb.weights;
  Qp qp;
  qp.P = Eigen::MatrixXd::Zero(n, n);
  qp.q = Eigen::VectorXd::Zero(n);
  auto var = [](int i) { return i - 1; };  // speed index -> variable index

  // Smoothness.
  if (w.w1 != 0.0 && n > 0) {
    qp.P(0, 0) += 2.0 * w.w1;
    qp.q(0) += -2.0 * w.w1 * pb.v0;
    for (int i = 1; i + 1 < T; ++i) {
      const int a = var(i);
      const int b = var(i + 1);
      qp.P(a, a) += 2.0 * w.w1;
      qp.P(b, b) += 2.0 * w.w1;
      qp.P(a, b) -= 2.0 * w.w1;
      qp.P(b, a) -= 2.0 * w.w1;
    }
  }
  // Position rows: d_i = dt v0 + dt sum_{k=1}^{i-1} v_k, i = 1..T.
  Eigen::VectorXd b(n);
  for (int i = 1; i <= T; ++i) {
    b.setZero();
    for (int k = 1; k <= i - 1; ++k) {
      b(var(k)) = dt;
    }
    const double a = dt * pb.v0;
    if (w.w2 != 0.0 && (!w.terminal_reach || i == T)) {
      qp.P.noalias() += 2.0 * w.w2 * b * b.transpose();
      qp.q += 2.0 * w.w2 * (a - pb.d_desired) * b;
    }
    if (w.w4 != 0.0 && !pb.obstacles.empty()) {
      const double s_ref = ref.s[static_cast<std::size_t>(i)];
      const auto c = clearance(pb, i, s_ref);
      if (std::isfinite(c.d)) {
        const double e = std::exp(-c.d);
        const double g = -w.w4 * e * c.slope;
        const double h = w.w4 * e * c.slope * c.slope;
        qp.P.noalias() += h * b * b.transpose();
        qp.q += (g + h * (a - s_ref)) * b;
      }
    }
  }
  // Risk: R(s_i) frozen at the reference positions in the quadratic, plus the first-order
  // change of R along s so that fixed points of the iteration are stationary for the true cost.
  if (w.w3 != 0.0 && pb.risk) {
    constexpr double h = 1e-3;
    for (int i = 1; i < T; ++i) {
      const double s_ref = ref.s[static_cast<std::size_t>(i)];
      const double t = i * dt;
      const double r = std::max(0.0, risk_value(pb, s_ref, t));
      qp.P(var(i), var(i)) += 2.0 * w.w3 * r;
      const double ahead = std::max(0.0, risk_value(pb, s_ref + h, t));
      const double behind = std::max(0.0, risk_value(pb, s_ref - h, t));
      const double slope = (ahead - behind) / (2.0 * h);
      const double v_ref = ref.v[static_cast<std::size_t>(i)];
      const double g = w.w3 * slope * v_ref * v_ref;
      for (int k = 1; k <= i - 1; ++k) {
        qp.q(var(k)) += g * dt;
      }
    }
  }

  // Constraints: box rows, rate rows, then the speed limit linearized in s.
  const double step = w.a_max * dt;
  const int rows = pb.speed_limit ? 3 * n : 2 * n;
  qp.A = Eigen::MatrixXd::Zero(rows, n);
  qp.l.resize(rows);
  qp.u.resize(rows);
  for (int i = 1; i < T; ++i) {
    const int r = var(i);
    qp.A(r, r) = 1.0;
    qp.l(r) = 0.0;
    qp.u(r) = w.v_cap;
    const int rr = n + r;
    qp.A(rr, r) = 1.0;
    if (i == 1) {
      qp.l(rr) = pb.v0 - step;
      qp.u(rr) = pb.v0 + step;
    } else {
      qp.A(rr, var(i - 1)) = -1.0;
      qp.l(rr) = -step;
      qp.u(rr) = step;
    }
  }
  if (pb.speed_limit) {
    for (int i = 1; i < T; ++i) {
      const int r = 2 * n + var(i);
      const double s_ref = ref.s[static_cast<std::size_t>(i)];
      const double cap = pb.speed_limit.value(pb.path_offset + s_ref);
      const double slope =
        pb.speed_limit.slope ? pb.speed_limit.slope(pb.path_offset + s_ref) : 0.0;
      // v_i <= cap + slope * (d_i - d_ref), d_i = dt v0 + dt sum_{k<i} v_k
      qp.A(r, var(i)) = 1.0;
      for (int k = 1; k <= i - 1; ++k) {
        qp.A(r, var(k)) -= slope * dt;
      }
      qp.l(r) = -1e20;
      qp.u(r) = std::max(0.0, cap) + slope * (dt * pb.v0 - s_ref);
    }
  }
  return qp;
}

/// Forward reachability of the chained box and rate constraints.
bool qp_feasible(const Qp & qp, double v0, double step)
{
  const auto n = qp.P.rows();
  if (qp.A.rows() > 2 * n) {
    return true;
  }
  double lo = v0;
  double hi = v0;
  for (Eigen::Index r = 0; r < n; ++r) {
    lo = std::max(qp.l(r), lo - step);
    hi = std::min(qp.u(r), hi + step);
    if (lo > hi) {
      return false;
    }
  }
  return true;
}

struct Candidate
{
  VelocityProfile profile;
  double cost{std::numeric_limits<double>::infinity()};
  int iterations{0};
};

Candidate convexify(const PlanProblem & pb, const SolverConfig & solver, VelocityProfile start)
{
  Candidate best{start, cost(start, pb).total, 0};
  VelocityProfile cur = std::move(start);
  AdmmState st;
  const double step = pb.weights.a_max * pb.dt;
  for (int it = 1; it <= solver.max_iterations; ++it) {
    best.iterations = it;
    const Qp qp = build_qp(pb, cur);
    if (!qp_feasible(qp, pb.v0, step)) {
      break;
    }
    const Eigen::VectorXd x = solve_qp(qp, st, solver.qp_tolerance, solver.qp_max_iterations);
    std::vector<double> v(static_cast<std::size_t>(pb.steps));
    v[0] = pb.v0;
    for (int i = 1; i < pb.steps; ++i) {
      v[static_cast<std::size_t>(i)] = x(i - 1);
    }
    // Step-size scan between the current iterate and the model minimizer; each trial is
    // repaired onto the true feasible set and judged by the true cost.
    VelocityProfile next;
    double c = std::numeric_limits<double>::infinity();
    for (double a = 1.0; a > 1e-2; a *= 0.5) {
      std::vector<double> mix(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        mix[i] = cur.v[i] + a * (v[i] - cur.v[i]);
      }
      if (!repair(mix, pb)) {
        continue;
      }
      auto trial = VelocityProfile::from_speeds(std::move(mix), pb.dt);
      const double ct = cost(trial, pb).total;
      if (ct < c) {
        c = ct;
        next = std::move(trial);
      }
    }
    if (!std::isfinite(c)) {
      break;
    }
    double moved = 0.0;
    for (std::size_t i = 0; i < next.v.size(); ++i) {
      moved = std::max(moved, std::abs(next.v[i] - cur.v[i]));
    }
    if (c < best.cost) {
      best.cost = c;
      best.profile = next;
    }
    cur = std::move(next);
    if (moved < solver.step_tolerance) {
      break;
    }
  }
  return best;
}

}  // namespace

const char * to_string(PlannerKind kind)
{
  switch (kind) {
    case PlannerKind::risk_aware:
      return "risk_aware";
    case PlannerKind::noap:
      return "noap";
    case PlannerKind::srq:
      return "srq";
    case PlannerKind::opbp:
      return "opbp";
  }
  return "noap";
}

PlannerKind planner_kind_from_string(const std::string & name)
{
  for (const auto k :
       {PlannerKind::risk_aware, PlannerKind::noap, PlannerKind::srq, PlannerKind::opbp}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw UsageError("unknown planner kind: " + name);
}

VelocityProfile VelocityProfile::from_speeds(std::vector<double> speeds, double dt)
{
  VelocityProfile p;
  p.dt = dt;
  p.v = std::move(speeds);
  p.s.assign(p.v.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    p.s[i + 1] = p.s[i] + p.v[i] * dt;
  }
  return p;
}

CostBreakdown cost(const VelocityProfile & profile, const PlanProblem & pb)
{
  CostBreakdown c;
  const auto & v = profile.v;
  const auto & s = profile.s;
  const std::size_t T = v.size();
  for (std::size_t i = 0; i + 1 < T; ++i) {
    const double dv = v[i + 1] - v[i];
    c.smooth += dv * dv;
  }
  for (std::size_t i = 1; i <= T; ++i) {
    if (!pb.weights.terminal_reach || i == T) {
      const double e = s[i] - pb.d_desired;
      c.reach += e * e;
    }
  }
  if (pb.risk && pb.weights.w3 != 0.0) {
    for (std::size_t i = 0; i < T; ++i) {
      const double r = risk_value(pb, s[i], static_cast<double>(i) * profile.dt);
      c.risk += std::max(0.0, r) * v[i] * v[i];
    }
  }
  if (!pb.obstacles.empty()) {
    for (std::size_t i = 1; i <= T; ++i) {
      const auto cl = clearance(pb, static_cast<int>(i), s[i]);
      if (std::isfinite(cl.d)) {
        c.collision += std::exp(-cl.d);
      }
    }
  }
  const auto & w = pb.weights;
  c.total = w.w1 * c.smooth + w.w2 * c.reach + w.w3 * c.risk + w.w4 * c.collision;
  return c;
}

bool feasible(const VelocityProfile & profile, const PlanProblem & pb, double tol)
{
  if (profile.v.size() != static_cast<std::size_t>(pb.steps) || profile.v.empty()) {
    return false;
  }
  if (profile.v[0] != pb.v0) {
    return false;
  }
  const double step = pb.weights.a_max * pb.dt;
  for (std::size_t i = 0; i < profile.v.size(); ++i) {
    const double v = profile.v[i];
    if (v < -tol || v > limit_at(pb, profile.s[i]) + tol) {
      return false;
    }
    if (i > 0 && std::abs(v - profile.v[i - 1]) > step + tol) {
      return false;
    }
  }
  return true;
}

PlanResult solve_plan(
  const PlanProblem & problem, const SolverConfig & solver, const VelocityProfile * initial)
{
  if (problem.steps < 2) {
    throw Infeasible("planning horizon needs at least two steps");
  }
  const auto T = static_cast<std::size_t>(problem.steps);
  const double step = problem.weights.a_max * problem.dt;
  std::vector<std::vector<double>> seeds;
  if (initial != nullptr && initial->v.size() == T) {
    seeds.push_back(initial->v);
  }
  seeds.emplace_back(T, problem.v0);
  if (solver.multistart) {
    // Ramps at the rate bound toward evenly spaced cruise speeds, full brake and full throttle
    // included, so both sides of each obstacle crossing get explored.
    const int levels = std::max(2, solver.start_levels);
    for (int k = 0; k < levels; ++k) {
      const double target = problem.weights.v_cap * k / (levels - 1);
      std::vector<double> ramp(T);
      double v = problem.v0;
      for (std::size_t i = 0; i < T; ++i) {
        ramp[i] = v;
        v = v < target ? std::min(target, v + step) : std::max(target, v - step);
      }
      seeds.push_back(std::move(ramp));
    }
  }

  Candidate best;
  bool any = false;
  for (auto & seed : seeds) {
    if (!repair(seed, problem)) {
      continue;
    }
    auto cand = convexify(problem, solver, VelocityProfile::from_speeds(seed, problem.dt));
    if (!any || cand.cost < best.cost) {
      best = std::move(cand);
      any = true;
    }
  }
  if (!any) {
    throw Infeasible(
      "no speed profile satisfies the bounds from v0 = " + std::to_string(problem.v0) + " m/s");
  }
  PlanResult out;
  out.profile = std::move(best.profile);
  out.cost = cost(out.profile, problem);
  out.iterations = best.iterations;
  return out;
}

PlanProblem make_problem(const Scenario & scenario, const PlannerWeights & weights)
{
  PlanProblem pb;
  pb.path = scenario.ego.reference_path;
  pb.path_offset = pb.path.project(scenario.ego.initial.position()).s;
  pb.v0 = scenario.ego.initial.speed;
  pb.dt = scenario.dt;
  pb.steps = scenario.steps();
  pb.d_desired = weights.d_desired >= 0.0 ? weights.d_desired : scenario.ego.d_desired;
  pb.weights = weights;
  const double ego_r = footprint_radius(scenario.ego.footprint);
  for (const auto & agent : scenario.agents) {
    if (agent.kind == AgentKind::phantom || agent.states.empty()) {
      continue;
    }
    PlanObstacle ob;
    ob.id = agent.id;
    ob.radius = ego_r + footprint_radius(agent.footprint);
    for (const auto & s : agent.states) {
      ob.positions.push_back(s.position());
    }
    pb.obstacles.push_back(std::move(ob));
  }
  return pb;
}

PlanResult plan_noap(
  const Scenario & scenario, const PlannerWeights & weights, const SolverConfig & solver)
{
  auto w = weights;
  w.w3 = 0.0;
  auto out = solve_plan(make_problem(scenario, w), solver);
  out.kind = PlannerKind::noap;
  return out;
}

PlanResult plan_risk_aware(
  const Scenario & scenario, const AnchorRisk & risk, const PlannerWeights & weights,
  const SolverConfig & solver)
{
  const auto noap = plan_noap(scenario, weights, solver);
  auto pb = make_problem(scenario, weights);
  pb.risk = [risk](double s, double t) { return risk.value(s, t); };
  auto out = solve_plan(pb, solver, &noap.profile);
  out.kind = PlannerKind::risk_aware;
  return out;
}

std::vector<double> occluded_conflicts(
  const Scenario & scenario, const std::vector<OccludedSegment> & segments,
  const SrqParams & params)
{
  const auto & path = scenario.ego.reference_path;
  const double start = path.project(scenario.ego.initial.position()).s;
  const double min_sin = std::sin(params.min_crossing_angle);
  std::vector<double> out;
  auto collect = [&](const Polyline & line) {
    const auto & pp = path.points();
    const auto & ps = path.arc_lengths();
    const auto & lp = line.points();
    for (std::size_t i = 0; i + 1 < pp.size(); ++i) {
      const Vec2 e = pp[i + 1] - pp[i];
      for (std::size_t j = 0; j + 1 < lp.size(); ++j) {
        const Vec2 f = lp[j + 1] - lp[j];
        const double sin_angle = std::abs(cross(e, f)) / (norm(e) * norm(f));
        if (sin_angle < min_sin) {
          continue;
        }
        if (const auto t = segment_intersection(pp[i], pp[i + 1], lp[j], lp[j + 1])) {
          const double s = ps[i] + *t * (ps[i + 1] - ps[i]);
          if (s >= start) {
            out.push_back(s);
          }
        }
      }
    }
  };
  for (const auto & seg : segments) {
    const auto * lane = scenario.find_lane(seg.lane_id);
    if (lane == nullptr) {
      continue;
    }
    const auto downstream = lane->centerline.slice(seg.s_start, lane->centerline.length());
    if (downstream.size() >= 2) {
      collect(downstream);
    }
    for (const auto & succ : lane->successors) {
      for (const auto & route : enumerate_routes(scenario, succ, 1)) {
        collect(route.path);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(
    std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-6; }),
    out.end());
  return out;
}

SpeedLimit srq_speed_limit(
  const std::vector<double> & conflicts, const SrqParams & params, double v_cap)
{
  auto raw = [conflicts, params](double s) {
    const auto it = std::lower_bound(conflicts.begin(), conflicts.end(), s);
    if (it == conflicts.end()) {
      return std::numeric_limits<double>::infinity();
    }
    return std::sqrt(2.0 * params.a_brake * std::max(0.0, *it - s - params.margin));
  };
  SpeedLimit limit;
  limit.value = [raw, v_cap](double s) { return std::min(v_cap, raw(s)); };
  limit.slope = [raw, v_cap, params](double s) {
    const double r = raw(s);
    if (r >= v_cap) {
      return 0.0;
    }
    // d/ds sqrt(2 a (c - m - s)) = -a / sqrt(...); bounded where the cap reaches zero.
    return -params.a_brake / std::max(r, 0.5);
  };
  return limit;
}

PlanResult plan_srq(
  const Scenario & scenario, const FieldOfView & fov, const PlannerWeights & weights,
  const SrqParams & params, const SolverConfig & solver, double sample_step,
  double min_segment_length)
{
  auto w = weights;
  w.w3 = 0.0;
  auto pb = make_problem(scenario, w);
  const auto segments = occluded_segments(scenario, fov, sample_step, min_segment_length);
  pb.speed_limit = srq_speed_limit(occluded_conflicts(scenario, segments, params), params, w.v_cap);
  auto out = solve_plan(pb, solver);
  out.kind = PlannerKind::srq;
  return out;
}

std::vector<KinematicState> profile_states(
  const VelocityProfile & profile, const Polyline & path, double path_offset)
{
  std::vector<KinematicState> out;
  out.reserve(profile.s.size());
  for (std::size_t i = 0; i < profile.s.size(); ++i) {
    const double s = path_offset + profile.s[i];
    const Vec2 p = path.point_at(s);
    const double v = profile.v.empty() ? 0.0 : profile.v[std::min(i, profile.v.size() - 1)];
    out.push_back({p.x, p.y, path.heading_at(s), v});
  }
  return out;
}

PlanResult plan_opbp(
  const Scenario & scenario, const TrajectorySet & phantom_trajectories,
  const PlannerWeights & weights, const SolverConfig & solver)
{
  const auto noap = plan_noap(scenario, weights, solver);
  auto w = weights;
  w.w3 = 0.0;
  auto pb = make_problem(scenario, w);
  const auto ego = profile_states(noap.profile, pb.path, pb.path_offset);
  const double ego_r = footprint_radius(scenario.ego.footprint);
  for (const auto & [id, modes] : phantom_trajectories) {
    const Trajectory * pick = nullptr;
    double closest = std::numeric_limits<double>::infinity();
    for (const auto & traj : modes) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < std::min(ego.size(), traj.states.size()); ++k) {
        d = std::min(d, distance(ego[k].position(), traj.states[k].position()));
      }
      if (pick == nullptr || d < closest) {
        closest = d;
        pick = &traj;
      }
    }
    if (pick == nullptr) {
      continue;
    }
    const auto * agent = scenario.find_agent(id);
    PlanObstacle ob;
    ob.id = id;
    ob.radius = ego_r + footprint_radius(agent != nullptr ? agent->footprint : Footprint{});
    for (const auto & s : pick->states) {
      ob.positions.push_back(s.position());
    }
    pb.obstacles.push_back(std::move(ob));
  }
  auto out = solve_plan(pb, solver, &noap.profile);
  out.kind = PlannerKind::opbp;
  return out;
}

}  // namespace occrisk
