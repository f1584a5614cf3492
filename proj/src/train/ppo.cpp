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

#include "arma/train/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arma/errors.hpp"
#include "arma/nn/gaussian.hpp"

namespace arma::train {

void PpoConfig::validate() const {
  if (batch <= 0 || minibatch <= 0 || num_envs <= 0 || epochs <= 0) {
    throw ConfigError("ppo sizes must be positive");
  }
  if (batch % minibatch != 0) throw ConfigError("ppo.minibatch must divide ppo.batch");
  if (batch % num_envs != 0) throw ConfigError("ppo.num_envs must divide ppo.batch");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo.gamma must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("ppo.lambda must lie in (0, 1]");
  if (clip < 0.0) throw ConfigError("ppo.clip must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("ppo.lr must be positive");
  if (max_grad_norm <= 0.0) throw ConfigError("ppo.max_grad_norm must be positive");
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const uint8_t> dones,
              double last_value, double gamma, double lambda) {
  const size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw DimensionError("gae inputs must have equal length");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = last_value;
  for (size_t k = n; k-- > 0;) {
    const double live = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * live - values[k];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
    next_value = values[k];
  }
  return out;
}

void normalize(std::span<double> v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  for (double& x : v) x = sd > 1e-8 ? (x - mean) / sd : x - mean;
}

void RolloutBuffer::resize(int envs, int steps_per_env, bool with_windows) {
  num_envs = envs;
  steps = steps_per_env;
  const auto n = static_cast<size_t>(envs) * static_cast<size_t>(steps_per_env);
  obs.assign(n * static_cast<size_t>(obs_dim), 0.0f);
  latents.assign(n * agents::kLatentDim, 0.0f);
  env_vecs.assign(n * static_cast<size_t>(env_dim), 0.0f);
  actions.assign(n * agents::kActionDim, 0.0f);
  log_probs.assign(n, 0.0);
  rewards.assign(n, 0.0);
  values.assign(n, 0.0);
  dones.assign(n, 0);
  last_values.assign(static_cast<size_t>(envs), 0.0);
  if (with_windows) {
    windows.assign(n * agents::kHistoryLength * agents::kHistoryChannels, 0.0f);
    warm.assign(n, 0);
    targets.assign(n * agents::kLatentDim, 0.0f);
  } else {
    windows.clear();
    warm.clear();
    targets.clear();
  }
  advantages.clear();
  returns.clear();
  episode_returns.clear();
  episode_lengths.clear();
  falls = 0;
  divergences = 0;
}

void RolloutBuffer::compute_advantages(double gamma, double lambda) {
  advantages.assign(static_cast<size_t>(size()), 0.0);
  returns.assign(static_cast<size_t>(size()), 0.0);
  for (int e = 0; e < num_envs; ++e) {
    const size_t off = static_cast<size_t>(e) * static_cast<size_t>(steps);
    const auto span_d = [&](const std::vector<double>& v) { return std::span<const double>(v.data() + off, steps); };
    const GaeResult g = gae(span_d(rewards), span_d(values), std::span<const uint8_t>(dones.data() + off, steps),
                            last_values[static_cast<size_t>(e)], gamma, lambda);
    std::copy(g.advantages.begin(), g.advantages.end(), advantages.begin() + static_cast<std::ptrdiff_t>(off));
    std::copy(g.returns.begin(), g.returns.end(), returns.begin() + static_cast<std::ptrdiff_t>(off));
  }
  normalize(advantages);
}

PpoTrainables ppo_trainables(agents::AgentSet& agents, LatentInput input) {
  PpoTrainables t;
  t.actor = agents.parameters(agents::kPolicy);
  if (input == LatentInput::kEncoder) {
    for (nn::Parameter* p : agents.parameters(agents::kEncoder)) t.actor.push_back(p);
  }
  t.critic = agents.parameters(agents::kCritic);
  return t;
}

namespace {

nn::Tensor gather(const std::vector<float>& src, int width, std::span<const int> rows) {
  nn::Tensor out({static_cast<int>(rows.size()), width});
  for (size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(rows[r]) * width, width,
                out.data() + static_cast<std::ptrdiff_t>(r) * width);
  }
  return out;
}

nn::Tensor gather(const std::vector<double>& src, std::span<const int> rows) {
  nn::Tensor out({static_cast<int>(rows.size()), 1});
  for (size_t r = 0; r < rows.size(); ++r) out[r] = static_cast<float>(src[static_cast<size_t>(rows[r])]);
  return out;
}

nn::Tensor anchors_of(const nn::Tensor& obs) {
  const int rows = obs.rows();
  nn::Tensor out({rows, agents::kActionDim});
  agents::Observation o{};
  for (int r = 0; r < rows; ++r) {
    std::copy_n(obs.data() + static_cast<std::ptrdiff_t>(r) * agents::kObsDim, agents::kObsDim, o.begin());
    const auto a = agents::anchor_targets(o);
    std::copy(a.begin(), a.end(), out.data() + static_cast<std::ptrdiff_t>(r) * agents::kActionDim);
  }
  return out;
}

}  // namespace

PpoLoss ppo_loss(agents::AgentSet& agents, nn::Tape& tape, const RolloutBuffer& buffer, std::span<const int> rows,
                 const PpoConfig& cfg, LatentInput input) {
  const float eps = static_cast<float>(cfg.clip);
  const nn::Tensor obs = gather(buffer.obs, buffer.obs_dim, rows);
  nn::Var x = tape.constant(obs);
  nn::Var ev = tape.constant(gather(buffer.env_vecs, buffer.env_dim, rows));
  nn::Var policy_in = x;
  if (input == LatentInput::kEncoder) {
    policy_in = concat_last(x, agents.mu().forward(tape, ev));
  } else if (input == LatentInput::kStored) {
    policy_in = concat_last(x, tape.constant(gather(buffer.latents, agents::kLatentDim, rows)));
  }
  PpoLoss l;
  nn::Var mu_a = agents.policy_mean(tape, policy_in, anchors_of(obs));
  nn::Var log_std = tape.parameter(agents.log_std());
  l.log_prob = nn::gaussian_log_prob(mu_a, log_std, tape.constant(gather(buffer.actions, agents::kActionDim, rows)));
  l.ratio = exp(l.log_prob - tape.constant(gather(buffer.log_probs, rows)));
  nn::Var adv = tape.constant(gather(buffer.advantages, rows));
  l.policy = -mean(minimum(l.ratio * adv, clamp(l.ratio, 1.0f - eps, 1.0f + eps) * adv));
  nn::Var v = agents.value(tape, concat_last(x, ev));
  l.value = mean(square(v - tape.constant(gather(buffer.returns, rows))));
  l.entropy = nn::gaussian_entropy(log_std);
  l.total = l.policy + l.value * static_cast<float>(cfg.value_coef) - l.entropy * static_cast<float>(cfg.entropy_coef);
  return l;
}

PpoStats ppo_update(agents::AgentSet& agents, nn::Adam& optimizer, const PpoTrainables& trainables,
                    const RolloutBuffer& buffer, const PpoConfig& cfg, LatentInput input, std::mt19937_64& rng) {
  if (buffer.advantages.size() != static_cast<size_t>(buffer.size())) {
    throw ContractError("ppo_update needs advantages; call compute_advantages first");
  }
  if (buffer.obs_dim != agents::kObsDim) throw DimensionError("rollout observation width mismatch");

  std::vector<nn::Tensor> snapshot;
  for (const nn::Parameter* p : optimizer.params()) snapshot.push_back(p->value);
  const nn::AdamState adam_snapshot = optimizer.state();

  const int n = buffer.size();
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const float eps = static_cast<float>(cfg.clip);

  PpoStats stats;
  double kl_sum = 0.0, clip_sum = 0.0;
  int counted = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += cfg.minibatch) {
      const std::span<const int> rows(order.data() + start, static_cast<size_t>(std::min(cfg.minibatch, n - start)));
      nn::Tape tape;
      const PpoLoss l = ppo_loss(agents, tape, buffer, rows, cfg, input);
      nn::Var loss = l.total;
      const float loss_value = loss.value()[0];
      if (!std::isfinite(loss_value)) {
        for (size_t i = 0; i < snapshot.size(); ++i) optimizer.params()[i]->value = snapshot[i];
        optimizer.load_state(adam_snapshot);
        stats.aborted = true;
        return stats;
      }
      optimizer.zero_grad();
      tape.backward(loss);
      clip_grad_norm(trainables.actor, cfg.max_grad_norm);
      clip_grad_norm(trainables.critic, cfg.max_grad_norm);
      try {
        optimizer.step();
      } catch (const DivergenceError&) {
        for (size_t i = 0; i < snapshot.size(); ++i) optimizer.params()[i]->value = snapshot[i];
        optimizer.load_state(adam_snapshot);
        stats.aborted = true;
        return stats;
      }

      const nn::Tensor& r = l.ratio.value();
      const nn::Tensor& lp = l.log_prob.value();
      double ratio_sum = 0.0, kl = 0.0;
      int clipped = 0;
      for (size_t i = 0; i < rows.size(); ++i) {
        ratio_sum += r[i];
        kl += buffer.log_probs[static_cast<size_t>(rows[i])] - lp[i];
        clipped += std::abs(r[i] - 1.0f) > eps ? 1 : 0;
      }
      if (epoch + 1 == cfg.epochs) {
        stats.ratio_deviation = std::max(stats.ratio_deviation, std::abs(ratio_sum / rows.size() - 1.0));
      }
      stats.pg_loss += l.policy.value()[0];
      stats.v_loss += l.value.value()[0];
      stats.entropy = l.entropy.value()[0];
      kl_sum += kl / static_cast<double>(rows.size());
      clip_sum += static_cast<double>(clipped) / static_cast<double>(rows.size());
      ++counted;
    }
  }
  stats.minibatches = counted;
  if (counted > 0) {
    stats.pg_loss /= counted;
    stats.v_loss /= counted;
    stats.approx_kl = kl_sum / counted;
    stats.clip_fraction = clip_sum / counted;
  }
  return stats;
}

}  // namespace arma::train
