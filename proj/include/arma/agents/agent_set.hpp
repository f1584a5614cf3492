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

#ifndef ARMA_AGENTS_AGENT_SET_HPP_
#define ARMA_AGENTS_AGENT_SET_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "arma/agents/observation.hpp"
#include "arma/nn/layers.hpp"

namespace arma::agents {

struct AgentConfig {
  int obs_dim = kObsDim;
  int env_dim = env::kEnvDim;
  int latent_dim = kLatentDim;
  int action_dim = kActionDim;
  std::vector<int> policy_hidden{128, 128};
  std::vector<int> mu_hidden{256};
  std::vector<int> critic_hidden{128, 128};
  std::vector<nn::ConvLayerSpec> phi_conv{{8, 4, 32}, {5, 1, 32}, {5, 1, 32}};
  std::vector<int> phi_hidden{256};
  int history = kHistoryLength;
  // False for the Robust-MLP baseline: the policy sees the observation only.
  bool use_latent = true;
  double init_log_std = -1.0;
  double policy_output_gain = 0.01;

  void validate() const;
  nn::MlpSpec policy_spec() const;
  nn::MlpSpec mu_spec() const;
  nn::MlpSpec critic_spec() const;
  nn::Conv1dSpec phi_spec() const;
};

enum Module : unsigned {
  kPolicy = 1u,      // pi and its log-std
  kEncoder = 2u,     // mu
  kAdaptation = 4u,  // phi
  kCritic = 8u,
  kAllModules = 15u,
};

enum class ActMode { kSample, kMean };

struct ActResult {
  env::JointVector action{};
  double log_prob = 0.0;
};

// Policy pi, encoder mu, adaptation module phi and critic.
//
// The policy mean is the anchor joint targets of the observation plus the
// network output, so actions are absolute PD targets.
class AgentSet {
 public:
  explicit AgentSet(AgentConfig config = {});

  // Deterministic per-module initialization.
  void init(uint64_t seed);

  const AgentConfig& config() const { return config_; }
  nn::Mlp& policy() { return pi_; }
  const nn::Mlp& policy() const { return pi_; }
  nn::Mlp& mu() { return mu_; }
  const nn::Mlp& mu() const { return mu_; }
  nn::Mlp& critic() { return critic_; }
  const nn::Mlp& critic() const { return critic_; }
  nn::ConvEncoder& phi() { return phi_; }
  const nn::ConvEncoder& phi() const { return phi_; }
  nn::Parameter& log_std() { return extra_.at("pi.log_std"); }
  const nn::Parameter& log_std() const { return extra_.at("pi.log_std"); }

  std::vector<nn::Parameter*> parameters(unsigned modules);
  std::vector<const nn::Parameter*> parameters(unsigned modules) const;
  // FNV-1a over names, shapes and values of the selected modules.
  uint64_t hash(unsigned modules) const;

  Latent encode(std::span<const double> e) const;
  // Throws WarmupError until the buffer holds a full window.
  Latent adapt(const HistoryBuffer& history) const;
  Latent adapt_window(std::span<const float> window) const;

  // Pass nullptr as latent when use_latent is false.
  std::array<float, kActionDim> policy_mean(const Observation& obs, const Latent* z) const;
  ActResult act(const Observation& obs, const Latent* z, ActMode mode, std::mt19937_64& rng) const;
  double value(const Observation& obs, std::span<const double> e) const;

  // Tape variants for training; `input` is obs (plus latent) rows and
  // `anchor` the matching anchor targets.
  nn::Var policy_mean(nn::Tape& tape, nn::Var input, const nn::Tensor& anchor);
  nn::Var value(nn::Tape& tape, nn::Var obs_and_e);

  int policy_input_dim() const { return config_.obs_dim + (config_.use_latent ? config_.latent_dim : 0); }

 private:
  AgentConfig config_;
  nn::Mlp pi_;
  nn::Mlp mu_;
  nn::Mlp critic_;
  nn::ConvEncoder phi_;
  nn::ParamSet extra_;
};

enum class LatentSource { kPrivileged, kEstimated, kStatic, kNone };

const char* latent_source_name(LatentSource s);

// Per-environment latent supply for a given source. Estimated and static
// sources return zeros until the history window is full; static then freezes
// the first full-window estimate for the rest of the episode.
class LatentTracker {
 public:
  explicit LatentTracker(LatentSource source, int history = kHistoryLength);

  void reset();
  void observe(const ScaledProprio& proprio, const env::JointVector& previous_action);
  Latent latent(const AgentSet& agents, std::span<const double> e);

  LatentSource source() const { return source_; }
  bool warm() const { return history_.full(); }
  const HistoryBuffer& history() const { return history_; }

 private:
  LatentSource source_;
  HistoryBuffer history_;
  std::optional<Latent> frozen_;
};

}  // namespace arma::agents

#endif  // ARMA_AGENTS_AGENT_SET_HPP_
