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

#include "arma/train/rollout.hpp"

#include <exception>
#include <thread>

#include "arma/errors.hpp"

namespace arma::train {

uint64_t derive_seed(uint64_t seed, uint64_t index) {
  // splitmix64 of seed xor a spread index.
  uint64_t z = seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

VecEnv::Slot::Slot(const env::EnvConfig& config, uint64_t env_seed, uint64_t act_seed, agents::LatentSource source)
    : env(std::make_unique<env::BipedEnv>(config, env_seed)), tracker(source), rng(act_seed) {
  begin_episode();
}

void VecEnv::Slot::begin_episode() {
  builder.reset();
  tracker.reset();
  const agents::ScaledProprio p = agents::scale_proprio(env->proprio());
  builder.push_proprio(p);
  tracker.observe(p, env::JointVector{});
  obs = builder.build(env->lookahead(), env->command());
  episode_return = 0.0;
  episode_length = 0;
}

VecEnv::VecEnv(int num_envs, const env::EnvConfig& config, uint64_t seed, agents::LatentSource source) {
  if (num_envs <= 0) throw ConfigError("number of environments must be positive");
  slots_.reserve(static_cast<size_t>(num_envs));
  for (int i = 0; i < num_envs; ++i) {
    slots_.emplace_back(config, derive_seed(seed, 2 * static_cast<uint64_t>(i)),
                        derive_seed(seed, 2 * static_cast<uint64_t>(i) + 1), source);
  }
}

void VecEnv::set_imitation_multiplier(double m) {
  for (Slot& s : slots_) s.env->set_imitation_multiplier(m);
}

void VecEnv::run_slot(size_t index, const agents::AgentSet& agents, RolloutBuffer& buf, int steps,
                      const RolloutOptions& opt, SlotStats& stats) {
  Slot& s = slots_[index];
  const bool use_latent = agents.config().use_latent;
  for (int t = 0; t < steps; ++t) {
    const size_t row = index * static_cast<size_t>(steps) + static_cast<size_t>(t);
    const auto e = s.env->params().flattened();
    const agents::Latent z = s.tracker.latent(agents, e);
    const agents::ActResult act = agents.act(s.obs, use_latent ? &z : nullptr, opt.act_mode, s.rng);

    std::copy(s.obs.begin(), s.obs.end(), buf.obs.begin() + static_cast<std::ptrdiff_t>(row * agents::kObsDim));
    std::copy(z.begin(), z.end(), buf.latents.begin() + static_cast<std::ptrdiff_t>(row * agents::kLatentDim));
    for (size_t i = 0; i < e.size(); ++i) buf.env_vecs[row * e.size() + i] = static_cast<float>(e[i]);
    for (int j = 0; j < agents::kActionDim; ++j) buf.actions[row * agents::kActionDim + j] = static_cast<float>(act.action[j]);
    buf.log_probs[row] = act.log_prob;
    buf.values[row] = agents.value(s.obs, e);
    if (opt.record_windows) {
      const size_t w = static_cast<size_t>(agents::kHistoryLength) * agents::kHistoryChannels;
      s.tracker.history().window(std::span<float>(buf.windows.data() + row * w, w));
      buf.warm[row] = s.tracker.warm() ? 1 : 0;
      const agents::Latent target = agents.encode(e);
      std::copy(target.begin(), target.end(), buf.targets.begin() + static_cast<std::ptrdiff_t>(row * agents::kLatentDim));
    }

    const env::StepResult r = s.env->step(act.action);
    double reward = r.reward;
    s.episode_return += r.reward;
    ++s.episode_length;
    if (!r.done) {
      const agents::ScaledProprio p = agents::scale_proprio(s.env->proprio());
      s.builder.push_action(act.action);
      s.builder.push_proprio(p);
      s.tracker.observe(p, act.action);
      s.obs = s.builder.build(s.env->lookahead(), s.env->command());
    } else {
      if (r.timeout && !r.fell && !r.diverged) {
        // Truncation, not failure: bootstrap from the final state.
        agents::ObservationBuilder tail = s.builder;
        tail.push_action(act.action);
        tail.push_proprio(agents::scale_proprio(s.env->proprio()));
        reward += opt.gamma * agents.value(tail.build(s.env->lookahead(), s.env->command()), s.env->params().flattened());
      }
      buf.dones[row] = 1;
      stats.returns.push_back(s.episode_return);
      stats.lengths.push_back(s.episode_length);
      if (r.fell) ++stats.falls;
      if (r.diverged) ++stats.divergences;
      s.env->reset();
      s.begin_episode();
    }
    buf.rewards[row] = reward;
  }
  buf.last_values[index] = agents.value(s.obs, s.env->params().flattened());
}

void VecEnv::collect(const agents::AgentSet& agents, RolloutBuffer& buf, int steps, const RolloutOptions& opt) {
  buf.resize(size(), steps, opt.record_windows);
  const size_t n = slots_.size();
  std::vector<SlotStats> stats(n);
  const int workers = std::max(1, std::min(opt.workers, static_cast<int>(n)));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) run_slot(i, agents, buf, steps, opt, stats[i]);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (size_t i = static_cast<size_t>(w); i < n; i += static_cast<size_t>(workers)) {
            run_slot(i, agents, buf, steps, opt, stats[i]);
          }
        } catch (...) {
          errors[static_cast<size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (const SlotStats& st : stats) {
    buf.episode_returns.insert(buf.episode_returns.end(), st.returns.begin(), st.returns.end());
    buf.episode_lengths.insert(buf.episode_lengths.end(), st.lengths.begin(), st.lengths.end());
    buf.falls += st.falls;
    buf.divergences += st.divergences;
  }
}

}  // namespace arma::train
