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

#include "occrisk/guided_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "occrisk/errors.hpp"

namespace occrisk
{

namespace
{

template <typename Real>
Real soft_min(const std::vector<Real> & v, Real tau)
{
  const Real m = *std::min_element(v.begin(), v.end());
  Real sum = 0;
  for (const Real x : v) {
    sum += std::exp(-(x - m) / tau);
  }
  return m - tau * std::log(sum);
}

template <typename Real>
Real soft_max(const std::vector<Real> & v, Real tau)
{
  const Real m = *std::max_element(v.begin(), v.end());
  Real sum = 0;
  for (const Real x : v) {
    sum += std::exp((x - m) / tau);
  }
  return m + tau * std::log(sum);
}

template <typename Real>
Real generic_sdf(Real px, Real py, const std::vector<LaneSegment> & lanes)
{
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto & lane : lanes) {
    const auto & pts = lane.centerline.points();
    const Real half = Real(0.5) * Real(lane.width);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Real ax = pts[i].x;
      const Real ay = pts[i].y;
      const Real ex = Real(pts[i + 1].x) - ax;
      const Real ey = Real(pts[i + 1].y) - ay;
      const Real len2 = ex * ex + ey * ey;
      Real t = len2 > 0 ? ((px - ax) * ex + (py - ay) * ey) / len2 : Real(0);
      t = std::clamp(t, Real(0), Real(1));
      const Real dx = px - (ax + t * ex);
      const Real dy = py - (ay + t * ey);
      const Real d = std::sqrt(dx * dx + dy * dy) - half;
      if (d <= 0) {
        return Real(0);
      }
      best = std::min(best, d);
    }
  }
  return std::isfinite(best) ? best : Real(0);
}

template <typename Real>
struct PathSample
{
  std::vector<Real> x;
  std::vector<Real> y;
};

template <typename Real>
PathSample<Real> generic_rollout(
  const KinematicState & s0, const std::vector<Real> & u, double dt_in)
{
  const Real dt = dt_in;
  const std::size_t steps = u.size() / 2;
  PathSample<Real> out;
  out.x.reserve(steps + 1);
  out.y.reserve(steps + 1);
  Real x = s0.x;
  Real y = s0.y;
  Real h = s0.heading;
  Real v = s0.speed;
  out.x.push_back(x);
  out.y.push_back(y);
  for (std::size_t i = 0; i < steps; ++i) {
    x += v * std::cos(h) * dt;
    y += v * std::sin(h) * dt;
    h += u[2 * i + 1] * dt;
    v = std::max(Real(0), v + u[2 * i] * dt);
    out.x.push_back(x);
    out.y.push_back(y);
  }
  return out;
}

template <typename Real>
struct GenericObjective
{
  Real value{0};
  Real interaction{0};
  Real road{0};
  double closest{std::numeric_limits<double>::infinity()};
  double max_offroad{0.0};
};

template <typename Real>
GenericObjective<Real> evaluate(
  const std::vector<Real> & u, const GuidanceScene & scene, const GuidanceConfig & cfg)
{
  GenericObjective<Real> out;
  if (cfg.interaction_weight == 0.0 && cfg.road_weight == 0.0) {
    return out;
  }
  const Real tau = cfg.temperature;
  const auto path = generic_rollout(scene.initial, u, scene.dt);
  const std::size_t n = path.x.size();

  std::vector<Real> dists;
  for (const auto & other : scene.others) {
    const std::size_t m = std::min(n, other.size());
    for (std::size_t t = 0; t < m; ++t) {
      const Real dx = path.x[t] - Real(other[t].x);
      const Real dy = path.y[t] - Real(other[t].y);
      const Real d = std::sqrt(dx * dx + dy * dy);
      dists.push_back(d);
      out.closest = std::min(out.closest, static_cast<double>(d));
    }
  }
  if (!dists.empty()) {
    out.interaction = -soft_min(dists, tau);
  }
  if (scene.lanes != nullptr && !scene.lanes->empty()) {
    std::vector<Real> viol(n);
    for (std::size_t t = 0; t < n; ++t) {
      viol[t] = generic_sdf(path.x[t], path.y[t], *scene.lanes);
      out.max_offroad = std::max(out.max_offroad, static_cast<double>(viol[t]));
    }
    out.road = -soft_max(viol, tau);
  }
  out.value = Real(cfg.interaction_weight) * out.interaction + Real(cfg.road_weight) * out.road;
  return out;
}

double closest_approach(
  const std::vector<Vec2> & path, const std::vector<std::vector<Vec2>> & others)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & other : others) {
    const std::size_t m = std::min(path.size(), other.size());
    for (std::size_t t = 0; t < m; ++t) {
      best = std::min(best, distance(path[t], other[t]));
    }
  }
  return best;
}

}  // namespace

ControlVector flatten(const ControlSequence & controls)
{
  ControlVector out;
  out.reserve(2 * controls.controls.size());
  for (const auto & u : controls.controls) {
    out.push_back(u.accel);
    out.push_back(u.yaw_rate);
  }
  return out;
}

ControlSequence unflatten(const ControlVector & flat, double dt)
{
  ControlSequence out;
  out.dt = dt;
  out.controls.reserve(flat.size() / 2);
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    out.controls.push_back({flat[i], flat[i + 1]});
  }
  return out;
}

DiffusionSchedule DiffusionSchedule::from_betas(const std::vector<double> & betas)
{
  DiffusionSchedule s;
  s.steps = static_cast<int>(betas.size());
  s.beta.assign(1, 0.0);
  s.alpha.assign(1, 1.0);
  s.alpha_bar.assign(1, 1.0);
  s.sigma.assign(1, 0.0);
  for (const double b : betas) {
    if (!(b > 0.0 && b < 1.0)) {
      throw std::invalid_argument("diffusion beta must lie in (0, 1)");
    }
    const double abar_prev = s.alpha_bar.back();
    const double abar = abar_prev * (1.0 - b);
    s.beta.push_back(b);
    s.alpha.push_back(1.0 - b);
    s.alpha_bar.push_back(abar);
    s.sigma.push_back(std::sqrt(b * (1.0 - abar_prev) / (1.0 - abar)));
  }
  return s;
}

DiffusionSchedule DiffusionSchedule::cosine(int steps, double offset, double max_beta)
{
  if (steps < 1) {
    throw std::invalid_argument("diffusion schedule needs at least one step");
  }
  auto f = [&](int k) {
    const double c =
      std::cos((static_cast<double>(k) / steps + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  std::vector<double> betas;
  betas.reserve(static_cast<std::size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    betas.push_back(std::clamp(1.0 - f(k) / f(k - 1), 1e-8, max_beta));
  }
  return from_betas(betas);
}

ControlVector forward_noise(
  const ControlVector & clean, int k, const DiffusionSchedule & schedule, CounterRng & rng)
{
  if (k < 0 || k > schedule.steps) {
    throw std::out_of_range("diffusion step out of range");
  }
  const double a = std::sqrt(schedule.alpha_bar[static_cast<std::size_t>(k)]);
  const double b = std::sqrt(1.0 - schedule.alpha_bar[static_cast<std::size_t>(k)]);
  ControlVector out(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    out[i] = a * clean[i] + b * rng.normal();
  }
  return out;
}

PosteriorCoefficients posterior_coefficients(int k, const DiffusionSchedule & schedule)
{
  if (k < 1 || k > schedule.steps) {
    throw std::out_of_range("diffusion step out of range");
  }
  const auto ku = static_cast<std::size_t>(k);
  const double abar = schedule.alpha_bar[ku];
  const double abar_prev = schedule.alpha_bar[ku - 1];
  const double denom = 1.0 - abar;
  if (denom <= 0.0) {
    return {0.0, 1.0};
  }
  return {
    std::sqrt(schedule.alpha[ku]) * (1.0 - abar_prev) / denom,
    std::sqrt(abar_prev) * schedule.beta[ku] / denom};
}

ControlVector posterior_mean(
  const ControlVector & noisy, const ControlVector & denoised, int k,
  const DiffusionSchedule & schedule)
{
  const auto c = posterior_coefficients(k, schedule);
  ControlVector out(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    out[i] = c.noisy * noisy[i] + c.denoised * denoised[i];
  }
  return out;
}

ObjectiveValue guidance_objective(
  const ControlVector & controls, const GuidanceScene & scene, const GuidanceConfig & cfg)
{
  const auto e = evaluate<double>(controls, scene, cfg);
  return {e.value, e.interaction, e.road, e.closest, e.max_offroad};
}

ControlVector guidance_gradient(
  const ControlVector & controls, const GuidanceScene & scene, const GuidanceConfig & cfg)
{
  const std::size_t n = controls.size();
  ControlVector grad(n, 0.0);
  if (cfg.interaction_weight == 0.0 && cfg.road_weight == 0.0) {
    return grad;
  }

  if (cfg.mode == GradientMode::finite_difference) {
    // Extended precision keeps cancellation error well below the truncation error at h = 1e-4.
    std::vector<long double> u(controls.begin(), controls.end());
    const long double h = cfg.fd_step;
    for (std::size_t i = 0; i < n; ++i) {
      const long double saved = u[i];
      u[i] = saved + h;
      const long double fp = evaluate<long double>(u, scene, cfg).value;
      u[i] = saved - h;
      const long double fm = evaluate<long double>(u, scene, cfg).value;
      u[i] = saved;
      grad[i] = static_cast<double>((fp - fm) / (2.0L * h));
    }
    return grad;
  }

  const std::size_t steps = n / 2;
  const double dt = scene.dt;
  std::vector<KinematicState> s(steps + 1);
  std::vector<bool> moving(steps, true);
  s[0] = scene.initial;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto & c = s[i];
    auto & nx = s[i + 1];
    nx.x = c.x + c.speed * std::cos(c.heading) * dt;
    nx.y = c.y + c.speed * std::sin(c.heading) * dt;
    nx.heading = c.heading + controls[2 * i + 1] * dt;
    const double v = c.speed + controls[2 * i] * dt;
    moving[i] = v > 0.0;
    nx.speed = std::max(0.0, v);
  }

  // dF / d position at every step.
  std::vector<Vec2> dp(steps + 1);
  const double tau = cfg.temperature;
  if (cfg.interaction_weight != 0.0 && !scene.others.empty()) {
    struct Pair
    {
      std::size_t t;
      Vec2 diff;
      double d;
    };
    std::vector<Pair> pairs;
    double m = std::numeric_limits<double>::infinity();
    for (const auto & other : scene.others) {
      const std::size_t len = std::min(steps + 1, other.size());
      for (std::size_t t = 0; t < len; ++t) {
        const Vec2 diff = s[t].position() - other[t];
        const double d = norm(diff);
        pairs.push_back({t, diff, d});
        m = std::min(m, d);
      }
    }
    double sum = 0.0;
    for (const auto & p : pairs) {
      sum += std::exp(-(p.d - m) / tau);
    }
    for (const auto & p : pairs) {
      if (p.d <= 0.0) {
        continue;
      }
      const double w = std::exp(-(p.d - m) / tau) / sum;
      dp[p.t] += p.diff * (-cfg.interaction_weight * w / p.d);
    }
  }
  if (cfg.road_weight != 0.0 && scene.lanes != nullptr && !scene.lanes->empty()) {
    std::vector<SdfSample> sdf(steps + 1);
    double m = 0.0;
    for (std::size_t t = 0; t <= steps; ++t) {
      sdf[t] = road_sdf_with_gradient(s[t].position(), *scene.lanes);
      m = std::max(m, sdf[t].value);
    }
    double sum = 0.0;
    for (const auto & v : sdf) {
      sum += std::exp((v.value - m) / tau);
    }
    for (std::size_t t = 0; t <= steps; ++t) {
      const double w = std::exp((sdf[t].value - m) / tau) / sum;
      dp[t] += sdf[t].gradient * (-cfg.road_weight * w);
    }
  }

  // Adjoint sweep through the Euler rollout.
  double lx = dp[steps].x;
  double ly = dp[steps].y;
  double lh = 0.0;
  double lv = 0.0;
  for (std::size_t i = steps; i-- > 0;) {
    grad[2 * i] = moving[i] ? lv * dt : 0.0;
    grad[2 * i + 1] = lh * dt;
    const double c = std::cos(s[i].heading);
    const double sn = std::sin(s[i].heading);
    const double v = s[i].speed;
    const double nh = lh + lx * (-v * sn * dt) + ly * (v * c * dt);
    const double nv = lx * c * dt + ly * sn * dt + (moving[i] ? lv : 0.0);
    lx += dp[i].x;
    ly += dp[i].y;
    lh = nh;
    lv = nv;
  }
  return grad;
}

NominalPriorDenoiser::NominalPriorDenoiser(
  double accel_std, double yaw_rate_std, ManeuverModes maneuver)
: accel_std_(accel_std), yaw_rate_std_(yaw_rate_std), maneuver_(maneuver)
{
  if (accel_std < 0.0 || yaw_rate_std < 0.0 || maneuver.accel_std < 0.0 ||
      maneuver.yaw_rate_std < 0.0 || maneuver.count < 0) {
    throw std::invalid_argument("prior deviations must be non-negative");
  }
}

namespace
{

/// Posterior-mean gain for prior variance `var` at cumulative signal level abar.
double posterior_gain(double var, double abar)
{
  const double denom = abar * var + (1.0 - abar);
  if (denom <= 0.0) {
    return 1.0 / std::sqrt(abar);
  }
  return std::sqrt(abar) * var / denom;
}

/// Orthonormal polynomial modes over n samples (Gram-Schmidt on 1, x, x^2, ... with x in
/// [-1, 1]).
std::vector<std::vector<double>> polynomial_modes(std::size_t n, int count)
{
  std::vector<std::vector<double>> basis;
  for (int deg = 0; deg < count && static_cast<std::size_t>(deg) < n; ++deg) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double x =
        n > 1 ? 2.0 * static_cast<double>(t) / static_cast<double>(n - 1) - 1.0 : 0.0;
      v[t] = std::pow(x, deg);
    }
    for (const auto & b : basis) {
      double c = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        c += v[t] * b[t];
      }
      for (std::size_t t = 0; t < n; ++t) {
        v[t] -= c * b[t];
      }
    }
    double norm2 = 0.0;
    for (const double x : v) {
      norm2 += x * x;
    }
    if (norm2 <= 1e-24) {
      break;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto & x : v) {
      x *= inv;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

ControlVector NominalPriorDenoiser::apply_gain(
  int k, const DiffusionSchedule & schedule, const ControlVector & r) const
{
  const double abar = schedule.alpha_bar[static_cast<std::size_t>(k)];
  const double white[2] = {accel_std_ * accel_std_, yaw_rate_std_ * yaw_rate_std_};
  const double mode_sd[2] = {maneuver_.accel_std, maneuver_.yaw_rate_std};
  ControlVector out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[i] = posterior_gain(white[i % 2], abar) * r[i];
  }
  const std::size_t n = r.size() / 2;
  if (n == 0 || maneuver_.count == 0 || (mode_sd[0] == 0.0 && mode_sd[1] == 0.0)) {
    return out;
  }
  // The modes are eigenvectors of the prior covariance, so the gain acts on them separately.
  const auto basis = polynomial_modes(n, maneuver_.count);
  for (std::size_t ch = 0; ch < 2; ++ch) {
    if (mode_sd[ch] == 0.0) {
      continue;
    }
    const double var = white[ch] + static_cast<double>(n) * mode_sd[ch] * mode_sd[ch];
    const double extra = posterior_gain(var, abar) - posterior_gain(white[ch], abar);
    for (const auto & b : basis) {
      double c = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        c += b[t] * r[2 * t + ch];
      }
      for (std::size_t t = 0; t < n; ++t) {
        out[2 * t + ch] += extra * c * b[t];
      }
    }
  }
  return out;
}

ControlVector NominalPriorDenoiser::denoise(
  const ControlVector & noisy, int k, const DiffusionSchedule & schedule,
  const DenoiserContext & ctx) const
{
  if (ctx.nominal == nullptr || ctx.nominal->size() != noisy.size()) {
    throw std::invalid_argument("denoiser context does not match the control dimension");
  }
  const auto & m = *ctx.nominal;
  const double root = std::sqrt(schedule.alpha_bar[static_cast<std::size_t>(k)]);
  ControlVector r(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    r[i] = noisy[i] - root * m[i];
  }
  ControlVector out = apply_gain(k, schedule, r);
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    out[i] += m[i];
  }
  return out;
}

ControlVector NominalPriorDenoiser::pullback(
  const ControlVector &, int k, const DiffusionSchedule & schedule, const DenoiserContext &,
  const ControlVector & cotangent) const
{
  return apply_gain(k, schedule, cotangent);
}

std::vector<Vec2> positions(const std::vector<KinematicState> & states)
{
  std::vector<Vec2> out;
  out.reserve(states.size());
  for (const auto & s : states) {
    out.push_back(s.position());
  }
  return out;
}

std::vector<Vec2> positions(const Trajectory & traj) { return positions(traj.states); }

double onroad_fraction(const Trajectory & traj, const std::vector<LaneSegment> & lanes)
{
  if (traj.states.empty() || lanes.empty()) {
    return 1.0;
  }
  std::size_t on = 0;
  for (const auto & s : traj.states) {
    if (road_sdf(s.position(), lanes) <= 0.0) {
      ++on;
    }
  }
  return static_cast<double>(on) / static_cast<double>(traj.states.size());
}

PhantomPrior make_phantom_prior(
  const Scenario & scenario, const AgentLog & phantom,
  const std::vector<std::vector<Vec2>> & others,
  const MultimodalConfig & cfg)
{
  PhantomPrior prior;
  prior.agent_id = phantom.id;
  prior.initial = phantom.states.front().kinematic();
  const int steps = scenario.steps();

  std::string lane_id;
  for (const auto & p : scenario.phantoms) {
    if (p.agent == phantom.id) {
      lane_id = p.segment_lane;
    }
  }
  if (lane_id.empty() && !scenario.lanes.empty()) {
    lane_id = locate_lane(scenario.lanes, prior.initial);
  }

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto & route : enumerate_routes(scenario, lane_id, cfg.route_depth)) {
    try {
      auto controls = nominal_controls(
        prior.initial, route, prior.initial.speed, steps, scenario.dt, cfg.limits, cfg.pursuit);
      const double d = closest_approach(positions(rollout(prior.initial, controls)), others);
      if (!found || d < best) {
        best = d;
        found = true;
        prior.route = route;
        prior.nominal = std::move(controls);
      }
    } catch (const OffRouteStart &) {
    }
  }
  if (!found) {
    prior.nominal.dt = scenario.dt;
    prior.nominal.controls.assign(static_cast<std::size_t>(steps), Control{});
  }
  return prior;
}

GuidedResult guided_reverse(
  const PhantomPrior & prior, const GuidanceScene & scene, const DiffusionSchedule & schedule,
  const Denoiser & denoiser, const GuidanceConfig & cfg, const ControlLimits & limits,
  CounterRng & rng)
{
  if (cfg.temperature <= 0.0 || cfg.step_scale < 0.0) {
    throw std::invalid_argument("guidance needs tau > 0 and a non-negative step scale");
  }
  GuidanceScene local = scene;
  local.initial = prior.initial;
  local.dt = prior.nominal.dt;

  const ControlVector nominal = flatten(prior.nominal);
  const DenoiserContext ctx{&nominal};
  const std::size_t n = nominal.size();

  ControlVector u(n);
  for (auto & x : u) {
    x = rng.normal();
  }
  for (int k = schedule.steps; k >= 1; --k) {
    const ControlVector a_hat = denoiser.denoise(u, k, schedule, ctx);
    if (cfg.active()) {
      const ControlVector g = guidance_gradient(a_hat, local, cfg);
      const ControlVector step = denoiser.pullback(u, k, schedule, ctx, g);
      const double scale = cfg.step_scale * schedule.sigma[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(step[i])) {
          std::ostringstream msg;
          msg << "non-finite guidance gradient for " << prior.agent_id << " at step " << k
              << ", coordinate " << i;
          throw NonFiniteGradient(msg.str());
        }
        u[i] += scale * step[i];
      }
    }
    u = posterior_mean(u, a_hat, k, schedule);
    if (k > 1) {
      const double sd = schedule.sigma[static_cast<std::size_t>(k)];
      for (auto & x : u) {
        x += sd * rng.normal();
      }
    }
  }

  GuidedResult result;
  result.controls = unflatten(u, local.dt).clamped(limits);
  result.trajectory = rollout(prior.initial, result.controls);
  result.trajectory.agent_id = prior.agent_id;
  result.trajectory.dt = local.dt;
  for (const auto & s : result.trajectory.states) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.heading) ||
        !std::isfinite(s.speed)) {
      throw NonFiniteGradient("non-finite state in guided rollout of " + prior.agent_id);
    }
  }
  result.nominal_closest_approach =
    closest_approach(positions(rollout(prior.initial, prior.nominal)), scene.others);
  result.closest_approach = closest_approach(positions(result.trajectory), scene.others);
  if (scene.lanes != nullptr) {
    result.onroad_fraction = onroad_fraction(result.trajectory, *scene.lanes);
  }
  return result;
}

}  // namespace occrisk
