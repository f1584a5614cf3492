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

#ifndef ARMA_ENV_ROBOT_HPP_
#define ARMA_ENV_ROBOT_HPP_

#include <array>

#include "arma/env/terrain.hpp"
#include "arma/env/types.hpp"

namespace arma::env {

struct LinkInertia {
  double mass = 0.0;
  Vec2 com;              // in the link frame
  double inertia = 0.0;  // about the center of mass
};

// Planar seven-link biped. Angles are measured counter-clockwise in the x-z
// plane; a leg segment at absolute angle 0 points straight down and a foot at
// absolute angle 0 is flat. Knees bend with negative angles.
struct RobotModel {
  double thigh_length = 0.5;
  double shank_length = 0.5;
  double ankle_height = 0.05;
  double heel_x = -0.06;
  double toe_x = 0.16;

  std::array<LinkInertia, kNumLinks> links{};

  JointVector kp{80, 80, 50, 80, 80, 50};
  JointVector kd{2, 2, 1, 2, 2, 1};
  JointVector torque_limit{150, 150, 150, 150, 150, 150};
  JointVector joint_damping{0.5, 0.5, 0.3, 0.5, 0.5, 0.3};
  JointVector joint_lower{-1.2, -2.6, -1.4, -1.2, -2.6, -1.4};
  JointVector joint_upper{1.6, 0.0, 1.4, 1.6, 0.0, 1.4};
  double limit_stiffness = 400.0;
  double limit_damping = 4.0;

  double contact_stiffness = 20000.0;
  double contact_damping = 250.0;
  double tangential_stiffness = 10000.0;
  double tangential_damping = 60.0;
  double base_friction = 1.0;  // multiplied by EnvParams::friction_ratio

  double gravity = 9.81;

  static RobotModel nominal();
  // Applies the randomized scales of `p` to the nominal quantities.
  RobotModel randomized(const EnvParams& p) const;

  double total_mass() const;
  double friction(const EnvParams& p) const { return base_friction * p.friction_ratio; }
};

// Per-step kinematic quantities needed by the dynamics.
struct PointKinematics {
  Vec2 pos;
  Vec2 vel;
  Vec2 bias;  // d/dt(J) qd
  std::array<Vec2, kNumDof> jac{};
};

struct Kinematics {
  std::array<PointKinematics, kNumLinks> com;
  std::array<PointKinematics, 4> contact;  // heel L, toe L, heel R, toe R
  std::array<Vec2, 2> knee;
  std::array<double, kNumLinks> angle{};
  std::array<double, kNumLinks> rate{};
};

Kinematics compute_kinematics(const RobotModel& model, const DofVector& q, const DofVector& qd);

// Dofs whose velocity contributes to the angular rate of each link.
bool link_depends_on(int link, int dof);

double kinetic_energy(const RobotModel& model, const RobotState& s);
double potential_energy(const RobotModel& model, const RobotState& s);

}  // namespace arma::env

#endif  // ARMA_ENV_ROBOT_HPP_
