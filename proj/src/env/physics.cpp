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

#include "arma/env/physics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "arma/errors.hpp"

namespace arma::env {

JointVector pd_torque(const JointVector& target, const RobotState& state, const RobotModel& model) {
  JointVector u{};
  for (size_t j = 0; j < kNumJoints; ++j) {
    const double raw = model.kp[j] * (target[j] - state.q[3 + j]) - model.kd[j] * state.qd[3 + j];
    u[j] = std::clamp(raw, -model.torque_limit[j], model.torque_limit[j]);
  }
  return u;
}

JointVector low_pass(const JointVector& raw, const JointVector& previous, double beta) {
  JointVector y{};
  for (size_t j = 0; j < kNumJoints; ++j) y[j] = beta * previous[j] + (1.0 - beta) * raw[j];
  return y;
}

RobotState physics_step(const RobotState& state, const JointVector& torque, const RobotModel& model,
                        const Terrain& terrain, double friction, double dt) {
  using Mat = Eigen::Matrix<double, kNumDof, kNumDof>;
  using Vec = Eigen::Matrix<double, kNumDof, 1>;
  const Kinematics k = compute_kinematics(model, state.q, state.qd);

  Mat mass = Mat::Zero();
  Vec force = Vec::Zero();
  for (int b = 0; b < kNumLinks; ++b) {
    const auto& link = model.links[static_cast<size_t>(b)];
    const PointKinematics& p = k.com[static_cast<size_t>(b)];
    const Vec2 accel_free{-p.bias.x, -model.gravity - p.bias.z};
    for (int i = 0; i < kNumDof; ++i) {
      const Vec2& ji = p.jac[static_cast<size_t>(i)];
      const double ai = link_depends_on(b, i) ? 1.0 : 0.0;
      force(i) += link.mass * ji.dot(accel_free);
      for (int j = i; j < kNumDof; ++j) {
        const double aj = link_depends_on(b, j) ? 1.0 : 0.0;
        mass(i, j) += link.mass * ji.dot(p.jac[static_cast<size_t>(j)]) + link.inertia * ai * aj;
      }
    }
  }

  RobotState next = state;
  for (size_t j = 0; j < kNumJoints; ++j) {
    const double q = state.q[3 + j];
    const double qd = state.qd[3 + j];
    double tau = torque[j];
    if (q < model.joint_lower[j]) {
      tau += model.limit_stiffness * (model.joint_lower[j] - q) - model.limit_damping * std::min(qd, 0.0);
    } else if (q > model.joint_upper[j]) {
      tau -= model.limit_stiffness * (q - model.joint_upper[j]) + model.limit_damping * std::max(qd, 0.0);
    }
    force(3 + static_cast<int>(j)) += tau - model.joint_damping[j] * qd;
    mass(3 + static_cast<int>(j), 3 + static_cast<int>(j)) += dt * model.joint_damping[j];
  }

  next.grf = {};
  for (size_t c = 0; c < 4; ++c) {
    const PointKinematics& p = k.contact[c];
    ContactPoint& cp = next.contacts[c];
    const double h = terrain.height(p.pos.x);
    const double s = terrain.slope_at(p.pos.x);
    const double inv = 1.0 / std::sqrt(1.0 + s * s);
    const Vec2 normal{-s * inv, inv};
    const Vec2 tangent{inv, s * inv};
    const double depth = (h - p.pos.z) * inv;
    if (depth <= 0.0) {
      cp.active = false;
      continue;
    }
    if (!cp.active) {
      cp.active = true;
      cp.anchor_x = p.pos.x;
    }
    const double vn = p.vel.dot(normal);
    const double fn = std::max(0.0, model.contact_stiffness * depth - model.contact_damping * vn);
    const double slip = (p.pos.x - cp.anchor_x) / inv;
    const double vt = p.vel.dot(tangent);
    double ft = -model.tangential_stiffness * slip - model.tangential_damping * vt;
    const double limit = friction * fn;
    if (std::abs(ft) > limit) {
      ft = std::copysign(limit, ft);
      cp.anchor_x = p.pos.x + (ft / model.tangential_stiffness) * inv;
    }
    const Vec2 f = fn * normal + ft * tangent;
    next.grf[c / 2] = next.grf[c / 2] + f;
    for (int i = 0; i < kNumDof; ++i) force(i) += p.jac[static_cast<size_t>(i)].dot(f);
  }

  mass.triangularView<Eigen::StrictlyLower>() = mass.transpose();
  const Vec qdd = mass.llt().solve(force);
  for (int i = 0; i < kNumDof; ++i) {
    next.qd[static_cast<size_t>(i)] += dt * qdd(i);
    next.q[static_cast<size_t>(i)] += dt * next.qd[static_cast<size_t>(i)];
  }
  next.torque = torque;
  next.time = state.time + dt;
  if (!next.finite()) {
    throw DivergenceError("simulation diverged at t=" + std::to_string(state.time));
  }
  return next;
}

}  // namespace arma::env
