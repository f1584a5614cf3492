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

#ifndef ARMA_GAIT_GAIT_HPP_
#define ARMA_GAIT_GAIT_HPP_

#include <array>
#include <string>
#include <vector>

#include "arma/env/types.hpp"

namespace arma::gait {

using env::Command;
using env::JointVector;

struct LegGeometry {
  double thigh = 0.5;
  double shank = 0.5;
  double ankle_height = 0.05;
};

struct GaitParams {
  double period = 1.0;
  double swing_height = 0.15;
  double duty_factor = 0.6;
  Command command;

  // Period falls linearly from 1.0 s at rest to 0.6 s at |speed| = 1.
  static GaitParams for_command(const Command& command);
  // Horizontal distance covered by the pelvis per gait cycle.
  double stride_length() const { return command.speed * period; }
  void validate() const;
};

struct ReferenceFrame {
  JointVector q_m{};
  JointVector dq_m{};
  std::array<double, 2> q_p{};   // pelvis x, height above ground
  std::array<double, 2> dq_p{};
  double pitch = 0.0;
  double pitch_rate = 0.0;
};

// Reference joint motion at gait phase in [0, 1) (wrapped otherwise). The
// left foot is in stance for phase < duty_factor; the right leg lags half a
// cycle. Pelvis x is left at 0; see PelvisIntegrator.
ReferenceFrame reference(const GaitParams& gait, double phase, const LegGeometry& leg = {});
ReferenceFrame reference(const Command& command, double phase, const LegGeometry& leg = {});

// Control-tick offsets of the observation lookahead.
inline constexpr std::array<int, 4> kLookaheadTicks{0, 1, 4, 7};

// References at the phases of control ticks t, t+1, t+4, t+7 under a constant
// command.
std::array<ReferenceFrame, 4> lookahead(const Command& command, double phase,
                                        const LegGeometry& leg = {});

// Phase advance over `seconds` at the command's gait period.
double phase_advance(const Command& command, double seconds);

// Integrates the commanded velocity into a pelvis position reference.
class PelvisIntegrator {
 public:
  explicit PelvisIntegrator(double x0 = 0.0) : x_(x0) {}
  void advance(const Command& command, double dt) { x_ += command.speed * dt; }
  double x() const { return x_; }
  void reset(double x0) { x_ = x0; }

 private:
  double x_;
};

struct PelvisReference {
  double x = 0.0;
  double height = 0.0;
  double vx = 0.0;
  double vz = 0.0;
  double pitch = 0.0;
  double pitch_rate = 0.0;
};

// Pelvis reference at time t >= 0 under a constant command from x0.
PelvisReference desired_pelvis(const Command& command, double t, double x0 = 0.0);

// Phase-sampled reference table as CSV (phase, 6 joint refs, 6 joint rates).
std::string gait_csv(const Command& command, int samples, const LegGeometry& leg = {});

}  // namespace arma::gait

#endif  // ARMA_GAIT_GAIT_HPP_
