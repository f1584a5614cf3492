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

#ifndef ARMA_AGENTS_OBSERVATION_HPP_
#define ARMA_AGENTS_OBSERVATION_HPP_

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "arma/env/biped_env.hpp"
#include "arma/gait/gait.hpp"

namespace arma::agents {

inline constexpr int kActionDim = env::kNumJoints;
inline constexpr int kLatentDim = 8;
inline constexpr int kProprioFrames = 5;
inline constexpr int kPastActions = 4;
inline constexpr int kLookaheadFrames = 4;
inline constexpr int kRefDim = 2 * env::kNumJoints;
inline constexpr int kCommandDim = 2;
inline constexpr int kObsDim = kProprioFrames * env::kProprioDim + kPastActions * kActionDim +
                               kLookaheadFrames * kRefDim + kCommandDim;
static_assert(kObsDim == 154);
inline constexpr int kHistoryLength = 70;
inline constexpr int kHistoryChannels = env::kProprioDim + kActionDim;
inline constexpr int kObservationLayoutVersion = 1;

// Lookahead frame whose joint targets anchor the policy mean (tick t+4).
inline constexpr int kAnchorFrame = 2;

using Observation = std::array<float, kObsDim>;
using Latent = std::array<float, kLatentDim>;
using ScaledProprio = std::array<float, env::kProprioDim>;

// Observation layout, in order:
//   proprio   5 x 16  current frame first, then t-1 .. t-4
//   actions   4 x 6   a_{t-1} .. a_{t-4}
//   lookahead 4 x 12  (q_m^r, scaled dq_m^r) at ticks t, t+1, t+4, t+7
//   command   2       speed, height
// Velocities are multiplied by fixed constants so every slot is O(1).
struct Segment {
  std::string_view name;
  int offset;
  int size;
};
const std::array<Segment, 4>& observation_layout();

// Per-segment views of an observation; assemble(parse(x)) == x bitwise.
struct ObservationParts {
  std::vector<float> proprio;
  std::vector<float> actions;
  std::vector<float> lookahead;
  std::vector<float> command;
};
ObservationParts parse(const Observation& obs);
Observation assemble(const ObservationParts& parts);

ScaledProprio scale_proprio(const env::Proprio& p);

// Anchor joint targets carried inside the observation.
std::span<const float, kActionDim> anchor_targets(const Observation& obs);

// Rolling proprio and action windows for one environment. Slots that have not
// been filled since reset() are zero.
class ObservationBuilder {
 public:
  void reset();
  void push_proprio(const ScaledProprio& p);
  void push_action(const env::JointVector& a);
  Observation build(const std::array<gait::ReferenceFrame, 4>& lookahead, const env::Command& command) const;

 private:
  std::array<ScaledProprio, kProprioFrames> frames_{};
  std::array<env::JointVector, kPastActions> actions_{};
};

// Ring buffer of the last k (proprio x_t, action a_{t-1}) pairs.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(int capacity = kHistoryLength);

  void clear();
  void push(const ScaledProprio& proprio, const env::JointVector& previous_action);
  bool full() const { return count_ == capacity_; }
  int count() const { return count_; }
  int capacity() const { return capacity_; }
  // Chronological (oldest first) copy, capacity x kHistoryChannels floats.
  void window(std::span<float> out) const;
  std::vector<float> window() const;

 private:
  int capacity_;
  int head_ = 0;
  int count_ = 0;
  std::vector<float> data_;
};

}  // namespace arma::agents

#endif  // ARMA_AGENTS_OBSERVATION_HPP_
