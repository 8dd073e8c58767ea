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

#ifndef OCCRISK__GUIDED_GEN_HPP_
#define OCCRISK__GUIDED_GEN_HPP_

#include <string>
#include <vector>

#include "occrisk/rng.hpp"
#include "occrisk/scene.hpp"
#include "occrisk/trajgen.hpp"

namespace occrisk
{

/// Flattened controls [accel_0, yaw_rate_0, accel_1, yaw_rate_1, ...].
using ControlVector = std::vector<double>;

ControlVector flatten(const ControlSequence & controls);
ControlSequence unflatten(const ControlVector & flat, double dt);

/// Noise schedule indexed 1..K; index 0 holds the clean endpoint (alpha_bar[0] = 1, sigma[0] = 0).
struct DiffusionSchedule
{
  int steps{0};
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
  /// Posterior standard deviation: sigma_k^2 = beta_k (1 - abar_{k-1}) / (1 - abar_k).
  std::vector<double> sigma;

  /// Cosine schedule on alpha_bar with offset s, betas clipped to max_beta.
  static DiffusionSchedule cosine(int steps, double offset = 0.008, double max_beta = 0.999);
  /// Schedule from explicit betas beta_1..beta_K.
  static DiffusionSchedule from_betas(const std::vector<double> & betas);
};

/// noisy = sqrt(abar_k) u + sqrt(1 - abar_k) eps, eps standard normal per coordinate.
ControlVector forward_noise(
  const ControlVector & clean, int k, const DiffusionSchedule & schedule, CounterRng & rng);

struct PosteriorCoefficients
{
  double noisy{0.0};
  double denoised{1.0};
};
PosteriorCoefficients posterior_coefficients(int k, const DiffusionSchedule & schedule);

/// Mean of q(u_{k-1} | u_k, a_hat). Returns the denoised prediction when abar_k = 1.
ControlVector posterior_mean(
  const ControlVector & noisy, const ControlVector & denoised, int k,
  const DiffusionSchedule & schedule);

enum class GradientMode { analytic, finite_difference };

struct GuidanceConfig
{
  double interaction_weight{1.0};
  double road_weight{5.0};
  double step_scale{20.0};
  /// Soft-min / soft-max temperature in meters.
  double temperature{1.0};
  GradientMode mode{GradientMode::analytic};
  double fd_step{1e-4};

  bool active() const
  {
    return step_scale != 0.0 && (interaction_weight != 0.0 || road_weight != 0.0);
  }
};

/// What the adversarial objective is evaluated against.
struct GuidanceScene
{
  KinematicState initial;
  double dt{0.1};
  /// Positions of every other trajectory, sampled on the same time grid.
  std::vector<std::vector<Vec2>> others;
  const std::vector<LaneSegment> * lanes{nullptr};
};

struct ObjectiveValue
{
  double value{0.0};
  /// -softmin of the pursuer-to-others distances.
  double interaction{0.0};
  /// -softmax of the off-road violation.
  double road{0.0};
  /// Hard minimum distance (reporting).
  double closest_approach{0.0};
  double max_offroad{0.0};
};

ObjectiveValue guidance_objective(
  const ControlVector & controls, const GuidanceScene & scene, const GuidanceConfig & cfg);

/// dF/d(controls), by backpropagation through the rollout or by central differences.
ControlVector guidance_gradient(
  const ControlVector & controls, const GuidanceScene & scene, const GuidanceConfig & cfg);

struct DenoiserContext
{
  /// Lane-following controls of the phantom's route.
  const ControlVector * nominal{nullptr};
};

class Denoiser
{
public:
  virtual ~Denoiser() = default;
  virtual ControlVector denoise(
    const ControlVector & noisy, int k, const DiffusionSchedule & schedule,
    const DenoiserContext & ctx) const = 0;
  /// Vector-Jacobian product of denoise() at `noisy`.
  virtual ControlVector pullback(
    const ControlVector & noisy, int k, const DiffusionSchedule & schedule,
    const DenoiserContext & ctx, const ControlVector & cotangent) const = 0;
};

/// Extra prior variance along smooth per-channel control offsets: the first `count` orthonormal
/// polynomial modes over the horizon (constant, linear, ...), each with per-step RMS `*_std`.
struct ManeuverModes
{
  double accel_std{0.0};
  double yaw_rate_std{0.0};
  int count{2};
};

/// Posterior-mean denoiser for a Gaussian prior centered on the nominal lane-following controls.
/// The covariance is white per channel plus optional smooth maneuver modes. With every deviation at
/// zero it returns the nominal controls for every input.
class NominalPriorDenoiser : public Denoiser
{
public:
  NominalPriorDenoiser(
    double accel_std = 0.15, double yaw_rate_std = 0.015, ManeuverModes maneuver = {});

  ControlVector denoise(
    const ControlVector & noisy, int k, const DiffusionSchedule & schedule,
    const DenoiserContext & ctx) const override;
  ControlVector pullback(
    const ControlVector & noisy, int k, const DiffusionSchedule & schedule,
    const DenoiserContext & ctx, const ControlVector & cotangent) const override;

private:
  /// Applies the (symmetric) posterior-mean gain operator at step k to a flattened vector.
  ControlVector apply_gain(
    int k, const DiffusionSchedule & schedule, const ControlVector & r) const;

  double accel_std_;
  double yaw_rate_std_;
  ManeuverModes maneuver_;
};

/// Phantom start, its chosen lane route, and the nominal controls that follow it.
struct PhantomPrior
{
  std::string agent_id;
  KinematicState initial;
  LaneRoute route;
  ControlSequence nominal;
};

/// Picks, among the phantom's successor routes, the one whose nominal rollout comes closest to
/// `others`.
PhantomPrior make_phantom_prior(
  const Scenario & scenario, const AgentLog & phantom,
  const std::vector<std::vector<Vec2>> & others,
  const MultimodalConfig & cfg);

struct GuidedResult
{
  Trajectory trajectory;
  ControlSequence controls;
  double nominal_closest_approach{0.0};
  double closest_approach{0.0};
  double onroad_fraction{1.0};
};

/// Reverse diffusion over the phantom's controls with adversarial guidance applied to the noisy
/// controls at every step. Throws NonFiniteGradient if the guidance gradient is not finite.
GuidedResult guided_reverse(
  const PhantomPrior & prior, const GuidanceScene & scene, const DiffusionSchedule & schedule,
  const Denoiser & denoiser, const GuidanceConfig & cfg, const ControlLimits & limits,
  CounterRng & rng);

/// Fraction of trajectory points with zero road violation.
double onroad_fraction(const Trajectory & traj, const std::vector<LaneSegment> & lanes);

/// Positions of a trajectory, for use as a GuidanceScene other.
std::vector<Vec2> positions(const Trajectory & traj);
std::vector<Vec2> positions(const std::vector<KinematicState> & states);

}  // namespace occrisk

#endif  // OCCRISK__GUIDED_GEN_HPP_
