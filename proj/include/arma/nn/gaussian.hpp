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

#ifndef ARMA_NN_GAUSSIAN_HPP_
#define ARMA_NN_GAUSSIAN_HPP_

#include <random>
#include <span>

#include "arma/nn/tape.hpp"

namespace arma::nn {

inline constexpr double kLog2Pi = 1.8378770664093453;

// Diagonal Gaussian with a state-independent log-std row (1, A).
// Returns per-row log-density, shape (batch, 1).
template <typename T>
BasicVar<T> gaussian_log_prob(BasicVar<T> mean, BasicVar<T> log_std, BasicVar<T> actions) {
  const int dims = mean.value().cols();
  BasicVar<T> z = (actions - mean) * exp(-log_std);
  BasicVar<T> per_dim = scale(square(z), T(-0.5)) - log_std;
  return add_scalar(sum_last(per_dim), static_cast<T>(-0.5 * dims * kLog2Pi));
}

template <typename T>
BasicVar<T> gaussian_entropy(BasicVar<T> log_std) {
  const int dims = static_cast<int>(log_std.value().size());
  return add_scalar(sum(log_std), static_cast<T>(0.5 * dims * (1.0 + kLog2Pi)));
}

// Tape-free log-density of one action vector.
double gaussian_log_prob(std::span<const float> mean, std::span<const float> log_std,
                         std::span<const float> action);

// Draws mean + exp(log_std) * N(0, 1) into `out`.
void gaussian_sample(std::span<const float> mean, std::span<const float> log_std,
                     std::mt19937_64& rng, std::span<float> out);

}  // namespace arma::nn

#endif  // ARMA_NN_GAUSSIAN_HPP_
