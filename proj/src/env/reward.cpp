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

#include "arma/env/reward.hpp"

#include <algorithm>
#include <cmath>

#include "arma/errors.hpp"

namespace arma::env {

void RewardConfig::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("reward weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("reward weights must sum to 1");
  for (double r : rhos) {
    if (r < 0.0) throw ConfigError("reward rho coefficients must be non-negative");
  }
  if (!(imitation_multiplier > 0.0 && imitation_multiplier <= 1.0)) {
    throw ConfigError("imitation multiplier must lie in (0, 1]");
  }
}

RewardBreakdown reward(const RewardInput& in, const gait::ReferenceFrame& ref, const RewardConfig& cfg) {
  std::array<double, kRewardTerms> err{};
  for (size_t j = 0; j < kNumJoints; ++j) {
    const double d = ref.q_m[j] - in.q_m[j];
    err[0] += d * d;
  }
  for (size_t i = 0; i < 2; ++i) {
    const double dp = ref.q_p[i] - in.pelvis[i];
    const double dv = ref.dq_p[i] - in.pelvis_vel[i];
    err[1] += dp * dp;
    err[2] += dv * dv;
  }
  err[3] = 1.0 - std::cos(ref.pitch - in.pitch);
  err[4] = (ref.pitch_rate - in.pitch_rate) * (ref.pitch_rate - in.pitch_rate);
  for (double u : in.torque) err[5] += u * u;
  for (const Vec2& f : in.grf) err[6] += f.norm2();

  RewardBreakdown out;
  long double total = 0.0L;
  for (size_t i = 0; i < kRewardTerms; ++i) {
    const double w = cfg.weights[i] * (i < 5 ? cfg.imitation_multiplier : 1.0);
    out.terms[i] = w * std::exp(-cfg.rhos[i] * err[i]);
    total += out.terms[i];
  }
  out.total = static_cast<double>(total);
  return out;
}

double imitation_multiplier(int iteration, int total_iterations, double floor, double decay_fraction) {
  if (total_iterations <= 0) return 1.0;
  const double end = decay_fraction * total_iterations;
  if (end <= 0.0) return floor;
  const double f = std::clamp(iteration / end, 0.0, 1.0);
  return 1.0 + (floor - 1.0) * f;
}

}  // namespace arma::env
