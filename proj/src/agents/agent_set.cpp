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

#include "arma/agents/agent_set.hpp"

#include <cstring>

#include "arma/errors.hpp"
#include "arma/hash.hpp"
#include "arma/nn/gaussian.hpp"

namespace arma::agents {

namespace {

nn::MlpSpec mlp(int in, std::vector<int> hidden, int out, double gain = 1.0) {
  nn::MlpSpec s;
  s.input_dim = in;
  s.hidden = std::move(hidden);
  s.output_dim = out;
  s.activation = nn::Activation::kTanh;
  s.output_gain = gain;
  return s;
}

uint64_t module_seed(uint64_t seed, uint64_t module) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(module)};
  uint64_t out[1];
  seq.generate(reinterpret_cast<uint32_t*>(out), reinterpret_cast<uint32_t*>(out) + 2);
  return out[0];
}

template <typename P, typename Set>
void append(std::vector<P>& out, Set&& params) {
  for (auto* p : params) out.push_back(p);
}

}  // namespace

void AgentConfig::validate() const {
  if (obs_dim <= 0 || env_dim <= 0 || latent_dim <= 0 || action_dim <= 0) {
    throw ConfigError("agent dimensions must be positive");
  }
  policy_spec().validate();
  mu_spec().validate();
  critic_spec().validate();
  phi_spec().validate();
}

nn::MlpSpec AgentConfig::policy_spec() const {
  return mlp(obs_dim + (use_latent ? latent_dim : 0), policy_hidden, action_dim, policy_output_gain);
}

nn::MlpSpec AgentConfig::mu_spec() const { return mlp(env_dim, mu_hidden, latent_dim); }

nn::MlpSpec AgentConfig::critic_spec() const { return mlp(obs_dim + env_dim, critic_hidden, 1); }

nn::Conv1dSpec AgentConfig::phi_spec() const {
  nn::Conv1dSpec s;
  s.in_channels = kHistoryChannels;
  s.length = history;
  s.layers = phi_conv;
  return s;
}

AgentSet::AgentSet(AgentConfig config)
    : config_(std::move(config)),
      pi_(config_.policy_spec(), "pi"),
      mu_(config_.mu_spec(), "mu"),
      critic_(config_.critic_spec(), "critic"),
      phi_(config_.phi_spec(), config_.phi_hidden, config_.latent_dim, "phi") {
  config_.validate();
  extra_.add("pi.log_std", nn::Tensor({1, config_.action_dim}, static_cast<float>(config_.init_log_std)));
}

void AgentSet::init(uint64_t seed) {
  std::mt19937_64 r1(module_seed(seed, 1)), r2(module_seed(seed, 2)), r3(module_seed(seed, 3)),
      r4(module_seed(seed, 4));
  pi_.init(r1);
  mu_.init(r2);
  phi_.init(r3);
  critic_.init(r4);
  log_std().value.fill(static_cast<float>(config_.init_log_std));
}

std::vector<nn::Parameter*> AgentSet::parameters(unsigned modules) {
  std::vector<nn::Parameter*> out;
  if (modules & kPolicy) {
    append(out, pi_.parameters());
    append(out, extra_.pointers());
  }
  if (modules & kEncoder) append(out, mu_.parameters());
  if (modules & kAdaptation) append(out, phi_.parameters());
  if (modules & kCritic) append(out, critic_.parameters());
  return out;
}

std::vector<const nn::Parameter*> AgentSet::parameters(unsigned modules) const {
  std::vector<const nn::Parameter*> out;
  for (nn::Parameter* p : const_cast<AgentSet*>(this)->parameters(modules)) out.push_back(p);
  return out;
}

uint64_t AgentSet::hash(unsigned modules) const {
  Fnv1a h;
  for (const nn::Parameter* p : parameters(modules)) {
    h.update(p->name);
    for (int d : p->value.shape()) h.update(&d, sizeof(d));
    h.update(p->value.data(), p->value.size() * sizeof(float));
  }
  return h.digest();
}

Latent AgentSet::encode(std::span<const double> e) const {
  if (static_cast<int>(e.size()) != config_.env_dim) {
    throw DimensionError("mu expects env vector of " + std::to_string(config_.env_dim) + ", got " +
                         std::to_string(e.size()));
  }
  nn::Tensor x({1, config_.env_dim});
  for (size_t i = 0; i < e.size(); ++i) x[i] = static_cast<float>(e[i]);
  const nn::Tensor z = mu_.infer(x);
  Latent out{};
  std::copy(z.values().begin(), z.values().end(), out.begin());
  return out;
}

Latent AgentSet::adapt(const HistoryBuffer& history) const {
  if (!history.full()) {
    throw WarmupError("adaptation module needs " + std::to_string(history.capacity()) + " history steps, have " +
                      std::to_string(history.count()));
  }
  return adapt_window(history.window());
}

Latent AgentSet::adapt_window(std::span<const float> window) const {
  nn::Tensor x({1, config_.history, kHistoryChannels}, std::vector<float>(window.begin(), window.end()));
  const nn::Tensor z = phi_.infer(x);
  Latent out{};
  std::copy(z.values().begin(), z.values().end(), out.begin());
  return out;
}

std::array<float, kActionDim> AgentSet::policy_mean(const Observation& obs, const Latent* z) const {
  nn::Tensor x({1, policy_input_dim()});
  std::copy(obs.begin(), obs.end(), x.data());
  if (config_.use_latent) {
    if (z == nullptr) throw ContractError("policy requires a latent input");
    std::copy(z->begin(), z->end(), x.data() + config_.obs_dim);
  }
  const nn::Tensor y = pi_.infer(x);
  const auto anchor = anchor_targets(obs);
  std::array<float, kActionDim> mean{};
  for (int j = 0; j < kActionDim; ++j) mean[j] = anchor[j] + y[static_cast<size_t>(j)];
  return mean;
}

ActResult AgentSet::act(const Observation& obs, const Latent* z, ActMode mode, std::mt19937_64& rng) const {
  const std::array<float, kActionDim> mean = policy_mean(obs, z);
  std::array<float, kActionDim> a = mean;
  if (mode == ActMode::kSample) nn::gaussian_sample(mean, log_std().value.values(), rng, a);
  ActResult out;
  for (int j = 0; j < kActionDim; ++j) out.action[j] = a[j];
  out.log_prob = nn::gaussian_log_prob(mean, log_std().value.values(), a);
  return out;
}

double AgentSet::value(const Observation& obs, std::span<const double> e) const {
  nn::Tensor x({1, config_.obs_dim + config_.env_dim});
  std::copy(obs.begin(), obs.end(), x.data());
  for (size_t i = 0; i < e.size(); ++i) x[static_cast<size_t>(config_.obs_dim) + i] = static_cast<float>(e[i]);
  return critic_.infer(x)[0];
}

nn::Var AgentSet::policy_mean(nn::Tape& tape, nn::Var input, const nn::Tensor& anchor) {
  return pi_.forward(tape, input) + tape.constant(anchor);
}

nn::Var AgentSet::value(nn::Tape& tape, nn::Var obs_and_e) { return critic_.forward(tape, obs_and_e); }

const char* latent_source_name(LatentSource s) {
  switch (s) {
    case LatentSource::kPrivileged: return "privileged";
    case LatentSource::kEstimated: return "estimated";
    case LatentSource::kStatic: return "static";
    case LatentSource::kNone: return "none";
  }
  return "?";
}

LatentTracker::LatentTracker(LatentSource source, int history) : source_(source), history_(history) {}

void LatentTracker::reset() {
  history_.clear();
  frozen_.reset();
}

void LatentTracker::observe(const ScaledProprio& proprio, const env::JointVector& previous_action) {
  if (source_ == LatentSource::kEstimated || source_ == LatentSource::kStatic) {
    history_.push(proprio, previous_action);
  }
}

Latent LatentTracker::latent(const AgentSet& agents, std::span<const double> e) {
  switch (source_) {
    case LatentSource::kPrivileged:
      return agents.encode(e);
    case LatentSource::kNone:
      return {};
    case LatentSource::kEstimated:
      return history_.full() ? agents.adapt(history_) : Latent{};
    case LatentSource::kStatic:
      if (frozen_) return *frozen_;
      if (!history_.full()) return {};
      frozen_ = agents.adapt(history_);
      return *frozen_;
  }
  return {};
}

}  // namespace arma::agents
