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

#ifndef ARMA_NN_GRADCHECK_HPP_
#define ARMA_NN_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "arma/nn/layers.hpp"

namespace arma::nn {

struct GradCheckOptions {
  double step = 1e-4;
  // Parameters checked per network; all of them when the network is smaller.
  size_t max_samples = 1500;
  int batch = 4;
};

// Compares reverse-mode gradients of `loss` against central finite
// differences on a sample of `params`. Runs in double precision. Returns
// max |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
double grad_check(const std::vector<BasicParameter<double>*>& params,
                  const std::function<BasicVar<double>(BasicTape<double>&)>& loss, uint64_t seed,
                  const GradCheckOptions& options = {});

// Random network, random input batch, loss = random projection of outputs.
double grad_check(const MlpSpec& spec, uint64_t seed, const GradCheckOptions& options = {});
double grad_check(const Conv1dSpec& conv, const std::vector<int>& head_hidden, int output_dim,
                  uint64_t seed, const GradCheckOptions& options = {});

}  // namespace arma::nn

#endif  // ARMA_NN_GRADCHECK_HPP_
