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

#ifndef ARMA_TRAIN_PHASES_HPP_
#define ARMA_TRAIN_PHASES_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <fstream>
#include <string>
#include <vector>

#include "arma/agents/agent_set.hpp"
#include "arma/env/biped_env.hpp"
#include "arma/io/checkpoint.hpp"
#include "arma/train/ppo.hpp"

namespace arma::train {

struct Phase2Config {
  int iterations = 2000;
  double lr = 1e-3;
  int batch = 4096;
  int num_envs = 16;
  int minibatch = 512;
  int epochs = 1;
  // Abort when the held-out MSE exceeds this multiple of the initial one.
  double divergence_factor = 10.0;
  // Iterations averaged for the reported final MSE.
  int smoothing = 20;

  void validate() const;
};

struct TrainConfig {
  PpoConfig ppo;
  int phase1_iterations = 1000;
  int phase3_iterations = 2000;
  int robust_iterations = 1000;
  Phase2Config phase2;
  agents::AgentConfig agents;
  env::EnvConfig env;
  double imitation_floor = 0.3;
  double imitation_decay_fraction = 0.5;
  int checkpoint_every = 50;
  uint64_t seed = 1;
  uint64_t config_hash = 0;
  int workers = 1;
  int log_every = 10;  // 0 silences progress lines on stderr

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double return_mean = 0.0;
  double pg_loss = 0.0;
  double v_loss = 0.0;
  double mse = 0.0;
  double imit_mult = 0.0;
  // Cumulative simulated experience, s.
  double seconds = 0.0;
};

// Append-only CSV: a comment line with the config hash and seed, the column
// header, then one flushed row per iteration.
class RunRecordWriter {
 public:
  RunRecordWriter(const std::filesystem::path& path, uint64_t config_hash, uint64_t seed, const std::string& phase,
                  bool append);
  void write(const IterationRecord& r);

 private:
  std::ofstream out_;
};

// Rows of a run record; throws CheckpointError when the file is malformed.
std::vector<IterationRecord> read_run_record(const std::filesystem::path& path);

struct PhaseOutput {
  io::Checkpoint checkpoint;
  std::vector<IterationRecord> records;
  double initial_mse = std::numeric_limits<double>::quiet_NaN();
  double final_mse = std::numeric_limits<double>::quiet_NaN();
};

// Each phase writes <name>.ckpt (refreshed every checkpoint_every
// iterations) and <name>.csv into out_dir.
PhaseOutput train_phase1(const TrainConfig& cfg, const std::filesystem::path& out_dir, bool resume = false);
PhaseOutput train_phase2(const TrainConfig& cfg, const io::Checkpoint& phase1, const std::filesystem::path& out_dir);
PhaseOutput train_phase3(const TrainConfig& cfg, const io::Checkpoint& phase1, const io::Checkpoint& phase2,
                         const std::filesystem::path& out_dir, bool resume = false);
PhaseOutput train_robust(const TrainConfig& cfg, const std::filesystem::path& out_dir, bool resume = false);

// Mean of ||phi(window) - target||^2 over warm rows of a buffer.
double latent_mse(const agents::AgentSet& agents, const RolloutBuffer& buffer);

}  // namespace arma::train

#endif  // ARMA_TRAIN_PHASES_HPP_
