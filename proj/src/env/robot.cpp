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

#include "arma/env/robot.hpp"

#include <cmath>

namespace arma::env {

namespace {

// Link index -> dofs that rotate it.
constexpr bool kDepends[kNumLinks][kNumDof] = {
    {false, false, true, false, false, false, false, false, false},
    {false, false, true, true, false, false, false, false, false},
    {false, false, true, true, true, false, false, false, false},
    {false, false, true, true, true, true, false, false, false},
    {false, false, true, false, false, false, true, false, false},
    {false, false, true, false, false, false, true, true, false},
    {false, false, true, false, false, false, true, true, true},
};

struct Term {
  int link;
  Vec2 local;
};

Vec2 rotate(double angle, Vec2 v) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.z, s * v.x + c * v.z};
}

template <size_t N>
PointKinematics chain_point(const std::array<Term, N>& terms, const Kinematics& k, const DofVector& q,
                            const DofVector& qd) {
  PointKinematics p;
  p.pos = {q[0], q[1]};
  p.jac[0] = {1.0, 0.0};
  p.jac[1] = {0.0, 1.0};
  for (const Term& t : terms) {
    const Vec2 w = rotate(k.angle[static_cast<size_t>(t.link)], t.local);
    const Vec2 perp{-w.z, w.x};
    p.pos = p.pos + w;
    const double r = k.rate[static_cast<size_t>(t.link)];
    p.bias = p.bias - (r * r) * w;
    for (int d = 2; d < kNumDof; ++d) {
      if (kDepends[t.link][d]) p.jac[static_cast<size_t>(d)] = p.jac[static_cast<size_t>(d)] + perp;
    }
  }
  for (int d = 0; d < kNumDof; ++d) p.vel = p.vel + qd[static_cast<size_t>(d)] * p.jac[static_cast<size_t>(d)];
  return p;
}

}  // namespace

bool link_depends_on(int link, int dof) { return kDepends[link][dof]; }

RobotModel RobotModel::nominal() {
  RobotModel m;
  m.links[0] = {4.0, {0.0, 0.15}, 0.08};
  const LinkInertia thigh{1.2, {0.0, -0.2}, 0.025};
  const LinkInertia shank{0.8, {0.0, -0.2}, 0.017};
  const LinkInertia foot{0.3, {0.05, -0.03}, 0.01};
  m.links[1] = thigh;
  m.links[2] = shank;
  m.links[3] = foot;
  m.links[4] = thigh;
  m.links[5] = shank;
  m.links[6] = foot;
  return m;
}

RobotModel RobotModel::randomized(const EnvParams& p) const {
  RobotModel m = *this;
  for (size_t i = 0; i < kNumLinks; ++i) {
    m.links[i].mass *= p.link_mass_scale[i];
    m.links[i].inertia *= p.link_mass_scale[i];
  }
  m.links[0].com = p.mass_center_scale[0] * m.links[0].com;
  for (size_t leg = 0; leg < 2; ++leg) {
    m.links[1 + 3 * leg].com = p.mass_center_scale[1] * m.links[1 + 3 * leg].com;
    m.links[2 + 3 * leg].com = p.mass_center_scale[2] * m.links[2 + 3 * leg].com;
  }
  for (double& d : m.joint_damping) d *= p.joint_damping_scale;
  m.contact_stiffness *= p.contact_spring_scale;
  return m;
}

double RobotModel::total_mass() const {
  double sum = 0.0;
  for (const auto& l : links) sum += l.mass;
  return sum;
}

Kinematics compute_kinematics(const RobotModel& model, const DofVector& q, const DofVector& qd) {
  Kinematics k;
  for (int b = 0; b < kNumLinks; ++b) {
    double a = 0.0;
    double r = 0.0;
    for (int d = 2; d < kNumDof; ++d) {
      if (kDepends[b][d]) {
        a += q[static_cast<size_t>(d)];
        r += qd[static_cast<size_t>(d)];
      }
    }
    k.angle[static_cast<size_t>(b)] = a;
    k.rate[static_cast<size_t>(b)] = r;
  }
  const Vec2 knee{0.0, -model.thigh_length};
  const Vec2 ankle{0.0, -model.shank_length};
  k.com[0] = chain_point(std::array<Term, 1>{{{0, model.links[0].com}}}, k, q, qd);
  for (int leg = 0; leg < 2; ++leg) {
    const int t = 1 + 3 * leg;
    const int s = t + 1;
    const int f = t + 2;
    k.com[static_cast<size_t>(t)] =
        chain_point(std::array<Term, 1>{{{t, model.links[static_cast<size_t>(t)].com}}}, k, q, qd);
    k.com[static_cast<size_t>(s)] = chain_point(
        std::array<Term, 2>{{{t, knee}, {s, model.links[static_cast<size_t>(s)].com}}}, k, q, qd);
    k.com[static_cast<size_t>(f)] = chain_point(
        std::array<Term, 3>{{{t, knee}, {s, ankle}, {f, model.links[static_cast<size_t>(f)].com}}}, k, q, qd);
    const Vec2 heel{model.heel_x, -model.ankle_height};
    const Vec2 toe{model.toe_x, -model.ankle_height};
    k.contact[static_cast<size_t>(2 * leg)] =
        chain_point(std::array<Term, 3>{{{t, knee}, {s, ankle}, {f, heel}}}, k, q, qd);
    k.contact[static_cast<size_t>(2 * leg + 1)] =
        chain_point(std::array<Term, 3>{{{t, knee}, {s, ankle}, {f, toe}}}, k, q, qd);
    k.knee[static_cast<size_t>(leg)] = Vec2{q[0], q[1]} + rotate(k.angle[static_cast<size_t>(t)], knee);
  }
  return k;
}

double kinetic_energy(const RobotModel& model, const RobotState& s) {
  const Kinematics k = compute_kinematics(model, s.q, s.qd);
  double e = 0.0;
  for (size_t b = 0; b < kNumLinks; ++b) {
    e += 0.5 * model.links[b].mass * k.com[b].vel.norm2();
    e += 0.5 * model.links[b].inertia * k.rate[b] * k.rate[b];
  }
  return e;
}

double potential_energy(const RobotModel& model, const RobotState& s) {
  const Kinematics k = compute_kinematics(model, s.q, s.qd);
  double e = 0.0;
  for (size_t b = 0; b < kNumLinks; ++b) e += model.links[b].mass * model.gravity * k.com[b].pos.z;
  return e;
}

}  // namespace arma::env
