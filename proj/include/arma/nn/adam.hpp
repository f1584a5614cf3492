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

#ifndef ARMA_NN_ADAM_HPP_
#define ARMA_NN_ADAM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "arma/nn/tape.hpp"

namespace arma::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moments for one parameter, matched by name.
struct AdamSlot {
  std::string name;
  Tensor first_moment;
  Tensor second_moment;
};

struct AdamState {
  AdamConfig config;
  int64_t step_count = 0;
  std::vector<AdamSlot> slots;
};

class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig config);

  // Bias-corrected update from the gradients currently stored in the
  // parameters. Throws DivergenceError naming the first non-finite gradient.
  void step();
  void zero_grad();

  int64_t step_count() const { return state_.step_count; }
  void set_lr(double lr) { state_.config.lr = lr; }
  const AdamState& state() const { return state_; }
  // Restores moments by parameter name; throws CheckpointError on mismatch.
  void load_state(const AdamState& state);
  const std::vector<Parameter*>& params() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  AdamState state_;
};

// Scales all gradients so their joint L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

}  // namespace arma::nn

#endif  // ARMA_NN_ADAM_HPP_
