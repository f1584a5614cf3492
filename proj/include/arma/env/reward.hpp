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

#ifndef ARMA_ENV_REWARD_HPP_
#define ARMA_ENV_REWARD_HPP_

#include <array>

#include "arma/env/types.hpp"
#include "arma/gait/gait.hpp"

namespace arma::env {

inline constexpr int kRewardTerms = 7;

struct RewardConfig {
  // Motor, pelvis position, pelvis velocity, pitch, pitch rate, torque, GRF.
  std::array<double, kRewardTerms> weights{0.3, 0.24, 0.15, 0.13, 0.06, 0.06, 0.06};
  std::array<double, kRewardTerms> rhos{5.0, 0.1, 5.0, 5.0, 1.0, 5e-7, 1.25e-5};
  // Scales the weights of the five imitation terms.
  double imitation_multiplier = 1.0;

  void validate() const;
};

// Measured quantities the reward compares against the reference.
struct RewardInput {
  JointVector q_m{};
  std::array<double, 2> pelvis{};      // x, height above ground
  std::array<double, 2> pelvis_vel{};  // x, z
  double pitch = 0.0;
  double pitch_rate = 0.0;
  JointVector torque{};
  std::array<Vec2, 2> grf{};
};

struct RewardBreakdown {
  double total = 0.0;
  // Weighted contributions; they sum to `total`.
  std::array<double, kRewardTerms> terms{};
};

RewardBreakdown reward(const RewardInput& in, const gait::ReferenceFrame& ref, const RewardConfig& cfg);

// Imitation multiplier schedule: linear from 1.0 to `floor` over the first
// `decay_fraction` of training, constant afterwards.
double imitation_multiplier(int iteration, int total_iterations, double floor = 0.3,
                            double decay_fraction = 0.5);

}  // namespace arma::env

#endif  // ARMA_ENV_REWARD_HPP_
