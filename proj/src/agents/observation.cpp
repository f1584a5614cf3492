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

#include "arma/agents/observation.hpp"

#include <algorithm>

#include "arma/errors.hpp"

namespace arma::agents {

namespace {

constexpr double kLinearVelScale = 0.5;
constexpr double kPitchRateScale = 0.2;
constexpr double kJointVelScale = 0.1;

constexpr int kProprioSize = kProprioFrames * env::kProprioDim;
constexpr int kActionsSize = kPastActions * kActionDim;
constexpr int kLookaheadSize = kLookaheadFrames * kRefDim;

const std::array<Segment, 4> kLayout{{
    {"proprio", 0, kProprioSize},
    {"actions", kProprioSize, kActionsSize},
    {"lookahead", kProprioSize + kActionsSize, kLookaheadSize},
    {"command", kProprioSize + kActionsSize + kLookaheadSize, kCommandDim},
}};

std::vector<float> slice(const Observation& obs, const Segment& s) {
  return {obs.begin() + s.offset, obs.begin() + s.offset + s.size};
}

void place(Observation& obs, const Segment& s, const std::vector<float>& v) {
  if (static_cast<int>(v.size()) != s.size) {
    throw DimensionError("observation segment '" + std::string(s.name) + "' expects " +
                         std::to_string(s.size) + " values, got " + std::to_string(v.size()));
  }
  std::copy(v.begin(), v.end(), obs.begin() + s.offset);
}

}  // namespace

const std::array<Segment, 4>& observation_layout() { return kLayout; }

ObservationParts parse(const Observation& obs) {
  return {slice(obs, kLayout[0]), slice(obs, kLayout[1]), slice(obs, kLayout[2]), slice(obs, kLayout[3])};
}

Observation assemble(const ObservationParts& parts) {
  Observation obs{};
  place(obs, kLayout[0], parts.proprio);
  place(obs, kLayout[1], parts.actions);
  place(obs, kLayout[2], parts.lookahead);
  place(obs, kLayout[3], parts.command);
  return obs;
}

ScaledProprio scale_proprio(const env::Proprio& p) {
  ScaledProprio s{};
  for (int i = 0; i < 7; ++i) s[i] = static_cast<float>(p[i]);
  s[7] = static_cast<float>(p[7] * kLinearVelScale);
  s[8] = static_cast<float>(p[8] * kLinearVelScale);
  s[9] = static_cast<float>(p[9] * kPitchRateScale);
  for (int i = 10; i < env::kProprioDim; ++i) s[i] = static_cast<float>(p[i] * kJointVelScale);
  return s;
}

std::span<const float, kActionDim> anchor_targets(const Observation& obs) {
  return std::span<const float, kActionDim>(obs.data() + kLayout[2].offset + kAnchorFrame * kRefDim, kActionDim);
}

void ObservationBuilder::reset() {
  frames_ = {};
  actions_ = {};
}

void ObservationBuilder::push_proprio(const ScaledProprio& p) {
  std::move_backward(frames_.begin(), frames_.end() - 1, frames_.end());
  frames_[0] = p;
}

void ObservationBuilder::push_action(const env::JointVector& a) {
  std::move_backward(actions_.begin(), actions_.end() - 1, actions_.end());
  actions_[0] = a;
}

Observation ObservationBuilder::build(const std::array<gait::ReferenceFrame, 4>& lookahead,
                                      const env::Command& command) const {
  Observation obs{};
  float* out = obs.data();
  for (const auto& f : frames_) out = std::copy(f.begin(), f.end(), out);
  for (const auto& a : actions_) {
    for (double v : a) *out++ = static_cast<float>(v);
  }
  for (const auto& r : lookahead) {
    for (double v : r.q_m) *out++ = static_cast<float>(v);
    for (double v : r.dq_m) *out++ = static_cast<float>(v * kJointVelScale);
  }
  *out++ = static_cast<float>(command.speed);
  *out++ = static_cast<float>(command.height);
  return obs;
}

HistoryBuffer::HistoryBuffer(int capacity)
    : capacity_(capacity), data_(static_cast<size_t>(capacity) * kHistoryChannels, 0.0f) {
  if (capacity <= 0) throw ContractError("history capacity must be positive");
}

void HistoryBuffer::clear() {
  head_ = 0;
  count_ = 0;
  std::fill(data_.begin(), data_.end(), 0.0f);
}

void HistoryBuffer::push(const ScaledProprio& proprio, const env::JointVector& previous_action) {
  float* row = data_.data() + static_cast<size_t>(head_) * kHistoryChannels;
  row = std::copy(proprio.begin(), proprio.end(), row);
  for (double a : previous_action) *row++ = static_cast<float>(a);
  head_ = (head_ + 1) % capacity_;
  count_ = std::min(count_ + 1, capacity_);
}

void HistoryBuffer::window(std::span<float> out) const {
  if (static_cast<int>(out.size()) != capacity_ * kHistoryChannels) {
    throw DimensionError("history window needs " + std::to_string(capacity_ * kHistoryChannels) + " floats");
  }
  // Oldest entry sits at head_ once the ring is full, at 0 before that.
  const int start = full() ? head_ : 0;
  std::fill(out.begin(), out.end(), 0.0f);
  const int skip = capacity_ - count_;
  for (int i = 0; i < count_; ++i) {
    const int src = (start + i) % capacity_;
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(src) * kHistoryChannels, kHistoryChannels,
                out.begin() + static_cast<std::ptrdiff_t>(skip + i) * kHistoryChannels);
  }
}

std::vector<float> HistoryBuffer::window() const {
  std::vector<float> out(static_cast<size_t>(capacity_) * kHistoryChannels);
  window(out);
  return out;
}

}  // namespace arma::agents
