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

#include "arma/env/biped_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "arma/errors.hpp"

namespace arma::env {

EpisodeScheduler::Resample EpisodeScheduler::tick(double previous, double now, std::mt19937_64& rng) const {
  Resample r;
  // Small slack so that t = 8.0 computed as 240 / 30 counts as a crossing.
  const double eps = 1e-9;
  const double before = std::floor((previous + eps) / period_);
  const double after = std::floor((now + eps) / period_);
  if (after > before) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&] { return u(rng); };
    r.command = sample_command(draw);
    r.params = sample_env_params(draw);
  }
  return r;
}

BipedEnv::BipedEnv(EnvConfig config, uint64_t seed)
    : config_(std::move(config)), rng_(seed), scheduler_(config_.resample_period) {
  config_.reward.validate();
  reset();
}

Command BipedEnv::draw_command() {
  if (config_.fixed_command) return *config_.fixed_command;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return sample_command([&] { return u(rng_); });
}

EnvParams BipedEnv::draw_params() {
  if (config_.fixed_params) return *config_.fixed_params;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EnvParams p = sample_env_params([&] { return u(rng_); });
  const Range& def = EnvParams::kFrictionRange;
  const Range& f = config_.friction_range;
  if (f.lo != def.lo || f.hi != def.hi) p.friction_ratio = f.lerp((p.friction_ratio - def.lo) / (def.hi - def.lo));
  return p;
}

void BipedEnv::set_params(const EnvParams& p) {
  params_ = p;
  model_ = config_.model.randomized(p);
}

void BipedEnv::reset() {
  const EnvParams p = draw_params();
  const Command c = draw_command();
  TerrainKind kind = TerrainKind::kFlat;
  if (config_.fixed_terrain) {
    kind = *config_.fixed_terrain;
  } else {
    const auto& mix = config_.terrain_mix;
    double total = 0.0;
    for (double w : mix) total += w;
    double pick = std::uniform_real_distribution<double>(0.0, total)(rng_);
    for (size_t i = 0; i < mix.size(); ++i) {
      if (pick < mix[i]) {
        kind = static_cast<TerrainKind>(i);
        break;
      }
      pick -= mix[i];
    }
  }
  const Terrain t = Terrain::generate(kind, p.terrain_amplitude, rng_);
  reset(p, c, t);
}

void BipedEnv::reset(const EnvParams& params, const Command& command, const Terrain& terrain) {
  set_params(params);
  command_ = command;
  terrain_ = terrain;
  steps_ = 0;
  pelvis_ref_.reset(0.0);
  const gait::ReferenceFrame ref = gait::reference(command_, 0.0);
  state_ = RobotState{};
  for (size_t j = 0; j < kNumJoints; ++j) {
    state_.q[3 + j] = ref.q_m[j];
    state_.qd[3 + j] = ref.dq_m[j];
  }
  state_.qd[0] = ref.dq_p[0];
  // Drop the robot so its lowest sole point rests on the ground.
  state_.q[1] = 0.0;
  const Kinematics k = compute_kinematics(model_, state_.q, state_.qd);
  double gap = 1e9;
  for (const auto& c : k.contact) gap = std::min(gap, c.pos.z - terrain_.height(c.pos.x));
  state_.q[1] = -gap + 1e-3;
  filtered_ = ref.q_m;
}

Proprio BipedEnv::proprio() const {
  Proprio p{};
  for (int i = 0; i < 7; ++i) p[static_cast<size_t>(i)] = state_.q[static_cast<size_t>(i + 2)];
  for (int i = 0; i < kNumDof; ++i) p[static_cast<size_t>(7 + i)] = state_.qd[static_cast<size_t>(i)];
  return p;
}

std::array<gait::ReferenceFrame, 4> BipedEnv::lookahead() const {
  return gait::lookahead(command_, state_.phase);
}

gait::ReferenceFrame BipedEnv::current_reference() const {
  gait::ReferenceFrame r = gait::reference(command_, state_.phase);
  r.q_p[0] = pelvis_ref_.x();
  return r;
}

bool BipedEnv::fallen() const {
  if (state_.q[1] - ground_height() < config_.fall_height) return true;
  if (std::abs(state_.q[2]) >= 0.5 * std::numbers::pi) return true;
  const Kinematics k = compute_kinematics(model_, state_.q, state_.qd);
  for (const Vec2& knee : k.knee) {
    if (knee.z < terrain_.height(knee.x)) return true;
  }
  return false;
}

StepResult BipedEnv::step(const JointVector& action) {
  StepResult out;
  filtered_ = low_pass(action, filtered_, config_.action_filter_beta);
  JointVector mean_torque{};
  std::array<Vec2, 2> mean_grf{};
  const double friction = model_.friction(params_);
  try {
    for (int i = 0; i < kDecimation; ++i) {
      const JointVector u = pd_torque(filtered_, state_, model_);
      state_ = physics_step(state_, u, model_, terrain_, friction);
      for (size_t j = 0; j < kNumJoints; ++j) mean_torque[j] += u[j] / kDecimation;
      for (size_t f = 0; f < 2; ++f) mean_grf[f] = mean_grf[f] + (1.0 / kDecimation) * state_.grf[f];
    }
  } catch (const DivergenceError&) {
    out.done = true;
    out.diverged = true;
    return out;
  }
  const double previous = time();
  ++steps_;
  state_.time = time();
  state_.phase = std::fmod(state_.phase + gait::phase_advance(command_, kControlDt), 1.0);
  pelvis_ref_.advance(command_, kControlDt);

  RewardInput in;
  for (size_t j = 0; j < kNumJoints; ++j) in.q_m[j] = state_.q[3 + j];
  in.pelvis = {state_.q[0], state_.q[1] - ground_height()};
  in.pelvis_vel = {state_.qd[0], state_.qd[1]};
  in.pitch = state_.q[2];
  in.pitch_rate = state_.qd[2];
  in.torque = mean_torque;
  in.grf = mean_grf;
  const RewardBreakdown rb = reward(in, current_reference(), config_.reward);
  out.reward = rb.total;
  out.terms = rb.terms;

  out.fell = fallen();
  out.timeout = steps_ >= config_.max_steps;
  out.done = out.fell || out.timeout;

  if (!out.done) {
    EpisodeScheduler::Resample rs = scheduler_.tick(previous, time(), rng_);
    if (rs.command && config_.resample_command) {
      command_ = config_.fixed_command ? *config_.fixed_command : *rs.command;
      out.resampled = true;
    }
    if (rs.params && config_.resample_params) {
      EnvParams p = config_.fixed_params ? *config_.fixed_params : *rs.params;
      // The terrain is generated once per episode.
      p.terrain_amplitude = params_.terrain_amplitude;
      set_params(p);
      out.resampled = true;
    }
  }
  return out;
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out) : out_(out) {
  out_ << "t,qx,qz,pitch,j1,j2,j3,j4,j5,j6,dj1,dj2,dj3,dj4,dj5,dj6,u1,u2,u3,u4,u5,u6,"
          "grf_L,grf_R,r,term1,term2,term3,term4,term5,term6,term7,done\n";
}

void TrajectoryWriter::write(const BipedEnv& env, const StepResult& r) {
  const RobotState& s = env.state();
  char buf[48];
  auto put = [&](double v, bool comma = true) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out_ << buf;
    if (comma) out_ << ',';
  };
  put(env.time());
  put(s.q[0]);
  put(s.q[1]);
  put(s.q[2]);
  for (size_t j = 0; j < kNumJoints; ++j) put(s.q[3 + j]);
  for (size_t j = 0; j < kNumJoints; ++j) put(s.qd[3 + j]);
  for (double u : s.torque) put(u);
  put(s.grf[0].z);
  put(s.grf[1].z);
  put(r.reward);
  for (double t : r.terms) put(t);
  out_ << (r.done ? 1 : 0) << '\n';
}

}  // namespace arma::env
