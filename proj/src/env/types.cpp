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

#include "arma/env/types.hpp"

namespace arma::env {

bool EnvParams::within_ranges() const {
  if (!kFrictionRange.contains(friction_ratio)) return false;
  for (double m : link_mass_scale) {
    if (!kMassRange.contains(m)) return false;
  }
  for (double c : mass_center_scale) {
    if (!kMassCenterRange.contains(c)) return false;
  }
  return kDampingRange.contains(joint_damping_scale) && kSpringRange.contains(contact_spring_scale) &&
         kTerrainRange.contains(terrain_amplitude);
}

std::array<double, kEnvDim> EnvParams::raw() const {
  std::array<double, kEnvDim> out{};
  size_t k = 0;
  out[k++] = friction_ratio;
  for (double m : link_mass_scale) out[k++] = m;
  for (double c : mass_center_scale) out[k++] = c;
  out[k++] = joint_damping_scale;
  out[k++] = contact_spring_scale;
  out[k++] = terrain_amplitude;
  return out;
}

std::array<double, kEnvDim> EnvParams::flattened() const {
  auto norm = [](double v, Range r) { return 2.0 * (v - r.lo) / (r.hi - r.lo) - 1.0; };
  std::array<double, kEnvDim> out{};
  size_t k = 0;
  out[k++] = norm(friction_ratio, kFrictionRange);
  for (double m : link_mass_scale) out[k++] = norm(m, kMassRange);
  for (double c : mass_center_scale) out[k++] = norm(c, kMassCenterRange);
  out[k++] = norm(joint_damping_scale, kDampingRange);
  out[k++] = norm(contact_spring_scale, kSpringRange);
  out[k++] = norm(terrain_amplitude, kTerrainRange);
  return out;
}

bool RobotState::finite() const {
  for (double v : q) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : qd) {
    if (!std::isfinite(v)) return false;
  }
  return std::isfinite(time);
}

}  // namespace arma::env
