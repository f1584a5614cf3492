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

#ifndef ARMA_ENV_TYPES_HPP_
#define ARMA_ENV_TYPES_HPP_

#include <array>
#include <cmath>
#include <vector>

namespace arma::env {

inline constexpr int kNumJoints = 6;  // hip, knee, ankle per leg; left leg first
inline constexpr int kNumDof = 9;     // pelvis x, pelvis z, pitch, then joints
inline constexpr int kNumLinks = 7;   // torso, thigh/shank/foot left, then right
inline constexpr int kEnvDim = 14;    // length of EnvParams::flattened()

inline constexpr double kControlHz = 30.0;
inline constexpr double kControlDt = 1.0 / kControlHz;

using JointVector = std::array<double, kNumJoints>;
using DofVector = std::array<double, kNumDof>;

struct Range {
  double lo;
  double hi;
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double lerp(double u) const { return lo + (hi - lo) * u; }
};

struct Command {
  double speed = 0.0;   // sagittal walking speed, m/s
  double height = 0.98; // pelvis walking height above ground, m

  static constexpr Range kSpeedRange{-1.0, 1.0};
  static constexpr Range kHeightRange{0.65, 1.0};

  bool valid() const { return kSpeedRange.contains(speed) && kHeightRange.contains(height); }
  friend bool operator==(const Command&, const Command&) = default;
};

// Privileged environment parameters. Link order is torso, thigh L, shank L,
// foot L, thigh R, shank R, foot R. Mass-center scales are shared across
// legs: torso, thigh, shank.
struct EnvParams {
  double friction_ratio = 1.0;
  std::array<double, kNumLinks> link_mass_scale{1, 1, 1, 1, 1, 1, 1};
  std::array<double, 3> mass_center_scale{1, 1, 1};
  double joint_damping_scale = 1.0;
  double contact_spring_scale = 1.0;
  double terrain_amplitude = 0.0;

  static constexpr Range kFrictionRange{0.3, 3.0};
  static constexpr Range kMassRange{0.7, 1.3};
  static constexpr Range kMassCenterRange{0.7, 1.3};
  static constexpr Range kDampingRange{0.3, 4.0};
  static constexpr Range kSpringRange{0.95, 1.05};
  static constexpr Range kTerrainRange{0.0, 0.12};

  bool within_ranges() const;
  // Every field mapped affinely from its randomization range onto [-1, 1],
  // in declaration order. This is the network-facing e_t.
  std::array<double, kEnvDim> flattened() const;
  // Raw field values in the same order.
  std::array<double, kEnvDim> raw() const;
};

// Uniform draw of every field over its randomization range. `uniform` returns
// values in [0, 1).
template <typename Uniform>
EnvParams sample_env_params(Uniform&& uniform) {
  EnvParams p;
  p.friction_ratio = EnvParams::kFrictionRange.lerp(uniform());
  for (auto& m : p.link_mass_scale) m = EnvParams::kMassRange.lerp(uniform());
  for (auto& c : p.mass_center_scale) c = EnvParams::kMassCenterRange.lerp(uniform());
  p.joint_damping_scale = EnvParams::kDampingRange.lerp(uniform());
  p.contact_spring_scale = EnvParams::kSpringRange.lerp(uniform());
  p.terrain_amplitude = EnvParams::kTerrainRange.lerp(uniform());
  return p;
}

template <typename Uniform>
Command sample_command(Uniform&& uniform) {
  Command c;
  c.speed = Command::kSpeedRange.lerp(uniform());
  c.height = Command::kHeightRange.lerp(uniform());
  return c;
}

struct Vec2 {
  double x = 0.0;
  double z = 0.0;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.z}; }
  double dot(Vec2 o) const { return x * o.x + z * o.z; }
  double norm2() const { return x * x + z * z; }
};

// Stick-slip state of one foot contact point.
struct ContactPoint {
  bool active = false;
  double anchor_x = 0.0;
};

struct RobotState {
  DofVector q{};   // x, z, pitch, joints
  DofVector qd{};
  std::array<Vec2, 2> grf{};  // per foot, world frame, N
  JointVector torque{};       // last applied motor torque, N m
  std::array<ContactPoint, 4> contacts{};  // heel L, toe L, heel R, toe R
  double time = 0.0;
  double phase = 0.0;

  double pitch() const { return q[2]; }
  bool finite() const;
};

}  // namespace arma::env

#endif  // ARMA_ENV_TYPES_HPP_
