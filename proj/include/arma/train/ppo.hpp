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

#ifndef ARMA_TRAIN_PPO_HPP_
#define ARMA_TRAIN_PPO_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "arma/agents/agent_set.hpp"
#include "arma/nn/adam.hpp"

namespace arma::train {

struct PpoConfig {
  int batch = 4096;
  int minibatch = 512;
  int num_envs = 16;
  int epochs = 4;
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  double lr = 3e-4;
  double entropy_coef = 1e-3;
  double value_coef = 0.5;
  double max_grad_norm = 1.0;

  int steps_per_env() const { return batch / num_envs; }
  void validate() const;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Recursive GAE over one environment's consecutive steps. dones[t] marks an
// episode ending after step t (no bootstrap across it); last_value bootstraps
// the final step otherwise.
GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const uint8_t> dones,
              double last_value, double gamma, double lambda);

// Shifts and scales to mean 0, std 1 (unchanged when the std is ~0).
void normalize(std::span<double> v);

// Rollout storage, env-major: row = env * steps + t.
struct RolloutBuffer {
  int num_envs = 0;
  int steps = 0;
  int obs_dim = agents::kObsDim;
  int env_dim = env::kEnvDim;

  std::vector<float> obs;
  std::vector<float> latents;  // latent fed to the policy
  std::vector<float> env_vecs;
  std::vector<float> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<uint8_t> dones;
  std::vector<double> last_values;

  // Present when adaptation windows are recorded.
  std::vector<float> windows;
  std::vector<uint8_t> warm;
  std::vector<float> targets;  // mu(e)

  std::vector<double> advantages;
  std::vector<double> returns;

  std::vector<double> episode_returns;
  std::vector<int> episode_lengths;
  int falls = 0;
  int divergences = 0;

  void resize(int envs, int steps_per_env, bool with_windows);
  int size() const { return num_envs * steps; }
  // Fills advantages/returns per environment, then normalizes advantages.
  void compute_advantages(double gamma, double lambda);
};

enum class LatentInput {
  kEncoder,  // z = mu(e) on the tape; gradients reach mu
  kStored,   // latent recorded during the rollout, held constant
  kNone,
};

struct PpoStats {
  double pg_loss = 0.0;
  double v_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  // Largest |mean ratio - 1| over the minibatches of the final epoch.
  double ratio_deviation = 0.0;
  int minibatches = 0;
  bool aborted = false;
};

struct PpoTrainables {
  std::vector<nn::Parameter*> actor;   // clipped together
  std::vector<nn::Parameter*> critic;  // clipped separately
};

PpoTrainables ppo_trainables(agents::AgentSet& agents, LatentInput input);

struct PpoLoss {
  nn::Var total;
  nn::Var policy;   // -mean(min(r A, clip(r) A))
  nn::Var value;    // mean((V - R)^2)
  nn::Var entropy;
  nn::Var ratio;    // (rows, 1)
  nn::Var log_prob; // (rows, 1)
};

// Loss graph for the given buffer rows.
PpoLoss ppo_loss(agents::AgentSet& agents, nn::Tape& tape, const RolloutBuffer& buffer, std::span<const int> rows,
                 const PpoConfig& cfg, LatentInput input);

// Clipped-surrogate update. A non-finite loss restores the pre-update
// parameters and returns with aborted set.
PpoStats ppo_update(agents::AgentSet& agents, nn::Adam& optimizer, const PpoTrainables& trainables,
                    const RolloutBuffer& buffer, const PpoConfig& cfg, LatentInput input, std::mt19937_64& rng);

}  // namespace arma::train

#endif  // ARMA_TRAIN_PPO_HPP_
