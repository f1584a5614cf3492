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

#include "arma/nn/adam.hpp"

#include <cmath>

#include "arma/nn/gaussian.hpp"

namespace arma::nn {

double gaussian_log_prob(std::span<const float> mean, std::span<const float> log_std,
                         std::span<const float> action) {
  double lp = 0.0;
  for (size_t i = 0; i < mean.size(); ++i) {
    const double ls = log_std[i];
    const double z = (static_cast<double>(action[i]) - mean[i]) * std::exp(-ls);
    lp += -0.5 * z * z - ls - 0.5 * kLog2Pi;
  }
  return lp;
}

void gaussian_sample(std::span<const float> mean, std::span<const float> log_std,
                     std::mt19937_64& rng, std::span<float> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (size_t i = 0; i < mean.size(); ++i) {
    out[i] = static_cast<float>(mean[i] + std::exp(static_cast<double>(log_std[i])) * normal(rng));
  }
}

Adam::Adam(std::vector<Parameter*> params, AdamConfig config) : params_(std::move(params)) {
  state_.config = config;
  for (Parameter* p : params_) {
    state_.slots.push_back({p->name, Tensor(p->value.shape()), Tensor(p->value.shape())});
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

void Adam::step() {
  for (Parameter* p : params_) {
    if (p->grad.size() != p->value.size()) {
      throw DimensionError("adam: gradient for '" + p->name + "' has shape " +
                           shape_string(p->grad.shape()) + ", expected " +
                           shape_string(p->value.shape()));
    }
    if (!p->grad.all_finite()) throw DivergenceError("adam: non-finite gradient in '" + p->name + "'");
  }
  const AdamConfig& c = state_.config;
  ++state_.step_count;
  const double t = static_cast<double>(state_.step_count);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    AdamSlot& s = state_.slots[k];
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double m = c.beta1 * s.first_moment[i] + (1.0 - c.beta1) * g;
      const double v = c.beta2 * s.second_moment[i] + (1.0 - c.beta2) * g * g;
      s.first_moment[i] = static_cast<float>(m);
      s.second_moment[i] = static_cast<float>(v);
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      p.value[i] = static_cast<float>(p.value[i] - c.lr * mhat / (std::sqrt(vhat) + c.eps));
    }
  }
}

void Adam::load_state(const AdamState& state) {
  if (state.slots.size() != params_.size()) {
    throw CheckpointError("adam state has " + std::to_string(state.slots.size()) +
                          " slots, optimizer has " + std::to_string(params_.size()));
  }
  for (size_t k = 0; k < params_.size(); ++k) {
    const AdamSlot& s = state.slots[k];
    if (s.name != params_[k]->name || s.first_moment.shape() != params_[k]->value.shape() ||
        s.second_moment.shape() != params_[k]->value.shape()) {
      throw CheckpointError("adam state slot '" + s.name + "' does not match parameter '" +
                            params_[k]->name + "'");
    }
  }
  state_ = state;
}

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    for (float g : p->grad.values()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const float s = static_cast<float>(max_norm / norm);
    for (Parameter* p : params) {
      for (float& g : p->grad.values()) g *= s;
    }
  }
  return norm;
}

}  // namespace arma::nn
