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

#ifndef ARMA_TRAIN_ROLLOUT_HPP_
#define ARMA_TRAIN_ROLLOUT_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "arma/agents/agent_set.hpp"
#include "arma/env/biped_env.hpp"
#include "arma/train/ppo.hpp"

namespace arma::train {

// Independent stream for component `index` of a run seeded with `seed`.
uint64_t derive_seed(uint64_t seed, uint64_t index);

struct RolloutOptions {
  agents::LatentSource source = agents::LatentSource::kPrivileged;
  agents::ActMode act_mode = agents::ActMode::kSample;
  bool record_windows = false;
  double gamma = 0.99;  // for bootstrapping timeouts
  int workers = 1;
};

// A fixed set of environments stepped in lockstep batches. Each slot owns its
// simulator, observation and latent state and random streams, so results do
// not depend on how slots are spread over worker threads.
class VecEnv {
 public:
  VecEnv(int num_envs, const env::EnvConfig& config, uint64_t seed, agents::LatentSource source);

  int size() const { return static_cast<int>(slots_.size()); }
  void set_imitation_multiplier(double m);

  // Fills `buffer` with `steps` transitions per slot, continuing episodes
  // across calls.
  void collect(const agents::AgentSet& agents, RolloutBuffer& buffer, int steps, const RolloutOptions& options);

 private:
  struct Slot {
    std::unique_ptr<env::BipedEnv> env;
    agents::ObservationBuilder builder;
    agents::LatentTracker tracker;
    std::mt19937_64 rng;
    agents::Observation obs{};
    double episode_return = 0.0;
    int episode_length = 0;

    Slot(const env::EnvConfig& config, uint64_t env_seed, uint64_t act_seed, agents::LatentSource source);
    void begin_episode();
  };

  struct SlotStats {
    std::vector<double> returns;
    std::vector<int> lengths;
    int falls = 0;
    int divergences = 0;
  };

  void run_slot(size_t index, const agents::AgentSet& agents, RolloutBuffer& buffer, int steps,
                const RolloutOptions& options, SlotStats& stats);

  std::vector<Slot> slots_;
};

}  // namespace arma::train

#endif  // ARMA_TRAIN_ROLLOUT_HPP_
