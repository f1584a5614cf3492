// Copyright 2026 The arma-planar Authors
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

#ifndef ARMA_ENV_BIPED_ENV_HPP_
#define ARMA_ENV_BIPED_ENV_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>

#include "arma/env/physics.hpp"
#include "arma/env/reward.hpp"
#include "arma/env/robot.hpp"
#include "arma/env/terrain.hpp"
#include "arma/env/types.hpp"
#include "arma/gait/gait.hpp"

namespace arma::env {

inline constexpr int kProprioDim = 16;  // pitch, 6 joints, then all 9 velocities
using Proprio = std::array<double, kProprioDim>;

struct EnvConfig {
  int max_steps = 2500;
  double resample_period = 8.0;
  double fall_height = 0.55;
  double action_filter_beta = 0.8;
  bool resample_command = true;
  bool resample_params = true;
  // Episode terrain mix (flat, slope, fractal, steps); normalized on use.
  std::array<double, 4> terrain_mix{0.25, 0.125, 0.5, 0.125};
  // Training friction draws; the network-facing encoding keeps the default range.
  Range friction_range = EnvParams::kFrictionRange;
  RewardConfig reward;
  RobotModel model = RobotModel::nominal();

  // When set, every reset and resample uses these instead of random draws.
  std::optional<Command> fixed_command;
  std::optional<EnvParams> fixed_params;
  std::optional<TerrainKind> fixed_terrain;
};

// Resamples command and parameters exactly at multiples of the period.
class EpisodeScheduler {
 public:
  struct Resample {
    std::optional<Command> command;
    std::optional<EnvParams> params;
  };

  explicit EpisodeScheduler(double period = 8.0) : period_(period) {}
  // `previous` and `now` are the times before and after one control step.
  Resample tick(double previous, double now, std::mt19937_64& rng) const;
  double period() const { return period_; }

 private:
  double period_;
};

struct StepResult {
  double reward = 0.0;
  std::array<double, kRewardTerms> terms{};
  bool done = false;
  bool fell = false;
  bool timeout = false;
  bool diverged = false;
  bool resampled = false;
};

class BipedEnv {
 public:
  BipedEnv(EnvConfig config, uint64_t seed);

  // Starts an episode with randomized (or fixed, per config) conditions.
  void reset();
  void reset(const EnvParams& params, const Command& command, const Terrain& terrain);

  // Filters the raw action, runs kDecimation PD-controlled physics substeps
  // and scores the result at the control rate.
  StepResult step(const JointVector& action);

  const RobotState& state() const { return state_; }
  const EnvParams& params() const { return params_; }
  const Command& command() const { return command_; }
  const Terrain& terrain() const { return terrain_; }
  const EnvConfig& config() const { return config_; }
  const RobotModel& model() const { return model_; }
  int steps() const { return steps_; }
  double time() const { return steps_ * kControlDt; }
  const JointVector& filtered_action() const { return filtered_; }
  double pelvis_x_reference() const { return pelvis_ref_.x(); }
  double ground_height() const { return terrain_.height(state_.q[0]); }

  Proprio proprio() const;
  std::array<gait::ReferenceFrame, 4> lookahead() const;
  // Reference at the current time, pelvis x filled from the integrator.
  gait::ReferenceFrame current_reference() const;

  void set_imitation_multiplier(double m) { config_.reward.imitation_multiplier = m; }
  void set_command(const Command& c) { command_ = c; }
  void set_state(const RobotState& s) { state_ = s; }
  void set_filtered_action(const JointVector& a) { filtered_ = a; }
  void set_params(const EnvParams& p);

 private:
  Command draw_command();
  EnvParams draw_params();
  bool fallen() const;

  EnvConfig config_;
  std::mt19937_64 rng_;
  EpisodeScheduler scheduler_;
  EnvParams params_;
  RobotModel model_;
  Command command_;
  Terrain terrain_;
  RobotState state_;
  JointVector filtered_{};
  gait::PelvisIntegrator pelvis_ref_;
  int steps_ = 0;
};

// Per-control-step trajectory rows, 9 significant digits.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::ostream& out);
  void write(const BipedEnv& env, const StepResult& r);

 private:
  std::ostream& out_;
};

}  // namespace arma::env

#endif  // ARMA_ENV_BIPED_ENV_HPP_
