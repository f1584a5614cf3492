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

#include "arma/gait/gait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "arma/errors.hpp"

namespace arma::gait {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double phase) {
  double p = std::fmod(phase, 1.0);
  if (p < 0.0) p += 1.0;
  return p;
}

struct FootTarget {
  double x, z, vx, vz;  // ankle relative to hip, velocities per second
};

FootTarget foot_target(const GaitParams& g, double phase, const LegGeometry& leg) {
  const double stance_len = g.command.speed * g.period * g.duty_factor;
  const double vertical = g.command.height - leg.ankle_height;
  FootTarget f{};
  if (phase < g.duty_factor) {
    const double s = phase / g.duty_factor;
    const double ds_dt = 1.0 / (g.duty_factor * g.period);
    f.x = 0.5 * stance_len - stance_len * s;
    f.vx = -stance_len * ds_dt;
    f.z = -vertical;
    f.vz = 0.0;
  } else {
    const double s = (phase - g.duty_factor) / (1.0 - g.duty_factor);
    const double ds_dt = 1.0 / ((1.0 - g.duty_factor) * g.period);
    f.x = -0.5 * stance_len + stance_len * (s - std::sin(kTwoPi * s) / kTwoPi);
    f.vx = stance_len * (1.0 - std::cos(kTwoPi * s)) * ds_dt;
    f.z = -vertical + 0.5 * g.swing_height * (1.0 - std::cos(kTwoPi * s));
    f.vz = 0.5 * g.swing_height * kTwoPi * std::sin(kTwoPi * s) * ds_dt;
  }
  return f;
}

// Closed-form planar two-link IK with the knee pointing forward and the foot
// kept flat. Writes hip, knee, ankle angles and rates.
void leg_ik(const FootTarget& f, const LegGeometry& leg, double* q, double* dq) {
  const double l1 = leg.thigh;
  const double l2 = leg.shank;
  const double d2 = f.x * f.x + f.z * f.z;
  if (std::sqrt(d2) > l1 + l2 + 1e-12) {
    throw InfeasibleCommandError("reference ankle target out of reach (" + std::to_string(std::sqrt(d2)) +
                                 " m > leg length " + std::to_string(l1 + l2) + " m)");
  }
  const double c = std::clamp((d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double bend = std::acos(c);
  const double knee = -bend;
  const double line = std::atan2(f.x, -f.z);
  const double th1 = line + std::atan2(l2 * std::sin(bend), l1 + l2 * std::cos(bend));
  const double th2 = th1 + knee;
  q[0] = th1;
  q[1] = knee;
  q[2] = -th2;
  // [l1 cos th1, l2 cos th2; l1 sin th1, l2 sin th2] [dth1; dth2] = [vx; vz]
  const double a = l1 * std::cos(th1), b = l2 * std::cos(th2);
  const double cc = l1 * std::sin(th1), d = l2 * std::sin(th2);
  double det = a * d - b * cc;
  if (std::abs(det) < 1e-9) det = std::copysign(1e-9, det == 0.0 ? 1.0 : det);
  const double dth1 = (d * f.vx - b * f.vz) / det;
  const double dth2 = (-cc * f.vx + a * f.vz) / det;
  dq[0] = dth1;
  dq[1] = dth2 - dth1;
  dq[2] = -dth2;
}

}  // namespace

GaitParams GaitParams::for_command(const Command& command) {
  GaitParams g;
  g.command = command;
  g.period = 1.0 - 0.4 * std::min(1.0, std::abs(command.speed));
  return g;
}

void GaitParams::validate() const {
  if (!command.valid()) {
    throw InfeasibleCommandError("command out of range: speed " + std::to_string(command.speed) +
                                 ", height " + std::to_string(command.height));
  }
  if (period < 0.5 || period > 1.0) throw InfeasibleCommandError("gait period outside [0.5, 1.0] s");
  if (duty_factor <= 0.5 || duty_factor >= 0.8) throw InfeasibleCommandError("duty factor outside (0.5, 0.8)");
}

ReferenceFrame reference(const GaitParams& gait, double phase, const LegGeometry& leg) {
  gait.validate();
  const double p = wrap(phase);
  ReferenceFrame r;
  leg_ik(foot_target(gait, p, leg), leg, &r.q_m[0], &r.dq_m[0]);
  leg_ik(foot_target(gait, wrap(p + 0.5), leg), leg, &r.q_m[3], &r.dq_m[3]);
  r.q_p = {0.0, gait.command.height};
  r.dq_p = {gait.command.speed, 0.0};
  return r;
}

ReferenceFrame reference(const Command& command, double phase, const LegGeometry& leg) {
  return reference(GaitParams::for_command(command), phase, leg);
}

double phase_advance(const Command& command, double seconds) {
  return seconds / GaitParams::for_command(command).period;
}

std::array<ReferenceFrame, 4> lookahead(const Command& command, double phase, const LegGeometry& leg) {
  const GaitParams g = GaitParams::for_command(command);
  std::array<ReferenceFrame, 4> out;
  for (size_t i = 0; i < kLookaheadTicks.size(); ++i) {
    out[i] = reference(g, phase + kLookaheadTicks[i] * env::kControlDt / g.period, leg);
  }
  return out;
}

PelvisReference desired_pelvis(const Command& command, double t, double x0) {
  PelvisReference r;
  r.x = x0 + command.speed * t;
  r.height = command.height;
  r.vx = command.speed;
  return r;
}

std::string gait_csv(const Command& command, int samples, const LegGeometry& leg) {
  std::string out = "phase,q1,q2,q3,q4,q5,q6,dq1,dq2,dq3,dq4,dq5,dq6\n";
  char buf[64];
  for (int i = 0; i < samples; ++i) {
    const double phase = static_cast<double>(i) / samples;
    const ReferenceFrame r = reference(command, phase, leg);
    std::snprintf(buf, sizeof(buf), "%.9g", phase);
    out += buf;
    for (double v : r.q_m) {
      std::snprintf(buf, sizeof(buf), ",%.9g", v);
      out += buf;
    }
    for (double v : r.dq_m) {
      std::snprintf(buf, sizeof(buf), ",%.9g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace arma::gait
