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

#ifndef ARMA_ENV_PHYSICS_HPP_
#define ARMA_ENV_PHYSICS_HPP_

#include "arma/env/robot.hpp"
#include "arma/env/terrain.hpp"
#include "arma/env/types.hpp"

namespace arma::env {

inline constexpr double kPhysicsDt = 1.0 / 600.0;
inline constexpr int kDecimation = 20;

// u_j = Kp_j (target_j - q_j) - Kd_j qd_j, clamped to the torque limit.
JointVector pd_torque(const JointVector& target, const RobotState& state, const RobotModel& model);

// y_t = beta * y_{t-1} + (1 - beta) * a_t.
JointVector low_pass(const JointVector& raw, const JointVector& previous, double beta);

// One semi-implicit Euler step of the floating-base dynamics with
// spring-damper contact and stick-slip Coulomb friction. `model` must already
// carry the randomized parameters; `friction` is the Coulomb coefficient.
// Joint viscous damping is integrated implicitly. Throws DivergenceError when
// the state becomes non-finite.
RobotState physics_step(const RobotState& state, const JointVector& torque, const RobotModel& model,
                        const Terrain& terrain, double friction, double dt = kPhysicsDt);

}  // namespace arma::env

#endif  // ARMA_ENV_PHYSICS_HPP_
