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

#include "arma/train/phases.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "arma/errors.hpp"
#include "arma/train/rollout.hpp"

namespace arma::train {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRecordHeader = "iter,return_mean,pg_loss,v_loss,mse,imit_mult,seconds";
constexpr const char* kToolVersion = "arma 0.1.0";

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

nlohmann::json base_metadata(const TrainConfig& cfg, int iteration) {
  return {{"config_hash", hex64(cfg.config_hash)},
          {"seed", cfg.seed},
          {"iteration", iteration},
          {"created_by", kToolVersion}};
}

double mean_of(const std::vector<double>& v, double fallback) {
  if (v.empty()) return fallback;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

class Progress {
 public:
  Progress(std::string name, int every) : name_(std::move(name)), every_(every), t0_(Clock::now()) {}
  void report(int iter, int total, const std::string& detail) const {
    if (every_ <= 0 || ((iter + 1) % every_ != 0 && iter + 1 != total)) return;
    const double s = std::chrono::duration<double>(Clock::now() - t0_).count();
    std::fprintf(stderr, "[%s] %d/%d %s (%.0f s)\n", name_.c_str(), iter + 1, total, detail.c_str(), s);
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::string name_;
  int every_;
  Clock::time_point t0_;
};

void check_resume(const io::Checkpoint& ck, const TrainConfig& cfg, const std::vector<IterationRecord>& rows,
                  const fs::path& csv) {
  if (ck.metadata.value("config_hash", std::string()) != hex64(cfg.config_hash)) {
    throw CheckpointError("cannot resume: checkpoint was written under a different configuration");
  }
  const int iteration = ck.metadata.value("iteration", -1);
  if (iteration < 0 || static_cast<int>(rows.size()) != iteration) {
    throw CheckpointError("cannot resume: " + csv.string() + " has " + std::to_string(rows.size()) +
                          " rows but the checkpoint is at iteration " + std::to_string(iteration));
  }
}

struct PpoPhaseSpec {
  std::string name;
  io::PhaseTag tag;
  agents::LatentSource source;
  LatentInput input;
  int iterations;
  bool decay_imitation;
  unsigned save_modules;
  uint64_t stream;
  nlohmann::json extra = nlohmann::json::object();
};

PhaseOutput run_ppo_phase(const TrainConfig& cfg, agents::AgentSet& agents, const PpoPhaseSpec& spec,
                          const fs::path& out_dir, bool resume) {
  fs::create_directories(out_dir);
  const fs::path ckpt_path = out_dir / (spec.name + ".ckpt");
  const fs::path csv_path = out_dir / (spec.name + ".csv");

  const PpoTrainables trainables = ppo_trainables(agents, spec.input);
  std::vector<nn::Parameter*> all = trainables.actor;
  all.insert(all.end(), trainables.critic.begin(), trainables.critic.end());
  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.ppo.lr;
  nn::Adam adam(all, adam_cfg);

  PhaseOutput out;
  int start = 0;
  if (resume) {
    if (!fs::exists(ckpt_path)) throw CheckpointError("nothing to resume: " + ckpt_path.string() + " missing");
    const io::Checkpoint ck = io::load_checkpoint(ckpt_path, spec.tag);
    out.records = read_run_record(csv_path);
    check_resume(ck, cfg, out.records, csv_path);
    start = ck.metadata["iteration"].get<int>();
    io::restore(agents, ck, spec.save_modules);
    adam.load_state(io::optimizer_state(ck, "adam"));
  }
  RunRecordWriter writer(csv_path, cfg.config_hash, cfg.seed, spec.name, resume);

  const uint64_t stream = spec.stream * 1000003ULL + static_cast<uint64_t>(start);
  VecEnv envs(cfg.ppo.num_envs, cfg.env, derive_seed(cfg.seed, stream), spec.source);
  std::mt19937_64 shuffle(derive_seed(cfg.seed, stream + 500000ULL));
  RolloutOptions opts;
  opts.source = spec.source;
  opts.gamma = cfg.ppo.gamma;
  opts.workers = cfg.workers;

  auto save = [&](int iteration) {
    io::Checkpoint ck = io::make_checkpoint(agents, spec.save_modules, spec.tag, base_metadata(cfg, iteration));
    for (const auto& [k, v] : spec.extra.items()) ck.metadata[k] = v;
    io::add_optimizer_state(ck, "adam", adam.state());
    io::save_checkpoint(ckpt_path, ck);
    return ck;
  };

  Progress progress(spec.name, cfg.log_every);
  RolloutBuffer buf;
  double last_return = out.records.empty() ? 0.0 : out.records.back().return_mean;
  for (int it = start; it < spec.iterations; ++it) {
    const double mult = spec.decay_imitation
                            ? env::imitation_multiplier(it, spec.iterations, cfg.imitation_floor,
                                                        cfg.imitation_decay_fraction)
                            : cfg.imitation_floor;
    envs.set_imitation_multiplier(mult);
    envs.collect(agents, buf, cfg.ppo.steps_per_env(), opts);
    buf.compute_advantages(cfg.ppo.gamma, cfg.ppo.lambda);
    const PpoStats stats = ppo_update(agents, adam, trainables, buf, cfg.ppo, spec.input, shuffle);
    if (stats.aborted) {
      std::fprintf(stderr, "[%s] iteration %d: non-finite loss, update discarded\n", spec.name.c_str(), it);
    }
    last_return = mean_of(buf.episode_returns, last_return);

    IterationRecord rec;
    rec.iter = it;
    rec.return_mean = last_return;
    rec.pg_loss = stats.pg_loss;
    rec.v_loss = stats.v_loss;
    rec.mse = std::numeric_limits<double>::quiet_NaN();
    rec.imit_mult = mult;
    rec.seconds = static_cast<double>(it + 1) * cfg.ppo.batch * env::kControlDt;
    writer.write(rec);
    out.records.push_back(rec);

    if ((it + 1) % cfg.checkpoint_every == 0 || it + 1 == spec.iterations) out.checkpoint = save(it + 1);
    char line[160];
    std::snprintf(line, sizeof(line), "return %.2f episodes %zu falls %d v_loss %.3f kl %.4f std %.3f", last_return,
                  buf.episode_returns.size(), buf.falls, stats.v_loss, stats.approx_kl,
                  std::exp(agents.log_std().value[0]));
    progress.report(it, spec.iterations, line);
  }
  if (start >= spec.iterations) out.checkpoint = io::load_checkpoint(ckpt_path, spec.tag);
  return out;
}

}  // namespace

void Phase2Config::validate() const {
  if (iterations <= 0 || batch <= 0 || num_envs <= 0 || minibatch <= 0 || epochs <= 0) {
    throw ConfigError("phase2 sizes must be positive");
  }
  if (batch % num_envs != 0) throw ConfigError("phase2.num_envs must divide phase2.batch");
  if (!(lr > 0.0)) throw ConfigError("phase2.lr must be positive");
  if (divergence_factor <= 1.0) throw ConfigError("phase2.divergence_factor must exceed 1");
  if (smoothing <= 0) throw ConfigError("phase2.smoothing must be positive");
}

void TrainConfig::validate() const {
  ppo.validate();
  phase2.validate();
  agents.validate();
  env.reward.validate();
  if (phase1_iterations <= 0 || phase3_iterations <= 0 || robust_iterations <= 0) {
    throw ConfigError("iteration counts must be positive");
  }
  if (!(imitation_floor > 0.0 && imitation_floor <= 1.0)) throw ConfigError("imitation floor must lie in (0, 1]");
  if (imitation_decay_fraction < 0.0 || imitation_decay_fraction > 1.0) {
    throw ConfigError("imitation decay fraction must lie in [0, 1]");
  }
  if (checkpoint_every <= 0) throw ConfigError("checkpoint interval must be positive");
  if (workers <= 0) throw ConfigError("workers must be positive");
}

RunRecordWriter::RunRecordWriter(const fs::path& path, uint64_t config_hash, uint64_t seed, const std::string& phase,
                                 bool append) {
  out_.open(path, append ? std::ios::app : std::ios::trunc);
  if (!out_) throw ConfigError("cannot write run record " + path.string());
  if (!append) {
    out_ << "# phase=" << phase << " config_hash=" << hex64(config_hash) << " seed=" << seed << "\n"
         << kRecordHeader << "\n";
    out_.flush();
  }
}

void RunRecordWriter::write(const IterationRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.iter, r.return_mean, r.pg_loss, r.v_loss,
                r.mse, r.imit_mult, r.seconds);
  out_ << buf;
  out_.flush();
}

std::vector<IterationRecord> read_run_record(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("missing run record " + path.string());
  std::vector<IterationRecord> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kRecordHeader) throw CheckpointError("run record " + path.string() + " has an unexpected header");
      header = true;
      continue;
    }
    IterationRecord r;
    std::istringstream ss(line);
    std::string field;
    std::vector<double> v;
    while (std::getline(ss, field, ',')) v.push_back(std::strtod(field.c_str(), nullptr));
    if (v.size() != 7) throw CheckpointError("run record " + path.string() + " has a malformed row");
    r.iter = static_cast<int>(v[0]);
    r.return_mean = v[1];
    r.pg_loss = v[2];
    r.v_loss = v[3];
    r.mse = v[4];
    r.imit_mult = v[5];
    r.seconds = v[6];
    if (r.iter != static_cast<int>(rows.size())) throw CheckpointError("run record " + path.string() + " skips rows");
    rows.push_back(r);
  }
  return rows;
}

PhaseOutput train_phase1(const TrainConfig& cfg, const fs::path& out_dir, bool resume) {
  cfg.validate();
  agents::AgentConfig ac = cfg.agents;
  ac.use_latent = true;
  agents::AgentSet agents(ac);
  agents.init(derive_seed(cfg.seed, 1));
  PpoPhaseSpec spec{"phase1",
                    io::PhaseTag::kPhase1,
                    agents::LatentSource::kPrivileged,
                    LatentInput::kEncoder,
                    cfg.phase1_iterations,
                    true,
                    agents::kPolicy | agents::kEncoder | agents::kCritic,
                    1};
  return run_ppo_phase(cfg, agents, spec, out_dir, resume);
}

PhaseOutput train_robust(const TrainConfig& cfg, const fs::path& out_dir, bool resume) {
  cfg.validate();
  agents::AgentConfig ac = cfg.agents;
  ac.use_latent = false;
  agents::AgentSet agents(ac);
  agents.init(derive_seed(cfg.seed, 4));
  PpoPhaseSpec spec{"robust",
                    io::PhaseTag::kRobust,
                    agents::LatentSource::kNone,
                    LatentInput::kNone,
                    cfg.robust_iterations,
                    true,
                    agents::kPolicy | agents::kCritic,
                    4};
  return run_ppo_phase(cfg, agents, spec, out_dir, resume);
}

double latent_mse(const agents::AgentSet& agents, const RolloutBuffer& buf) {
  const int window = agents::kHistoryLength * agents::kHistoryChannels;
  std::vector<int> rows;
  for (int i = 0; i < buf.size(); ++i) {
    if (buf.warm[static_cast<size_t>(i)]) rows.push_back(i);
  }
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  constexpr int kChunk = 256;
  for (size_t start = 0; start < rows.size(); start += kChunk) {
    const int n = static_cast<int>(std::min<size_t>(kChunk, rows.size() - start));
    nn::Tensor x({n, agents::kHistoryLength, agents::kHistoryChannels});
    for (int r = 0; r < n; ++r) {
      std::copy_n(buf.windows.begin() + static_cast<std::ptrdiff_t>(rows[start + r]) * window, window,
                  x.data() + static_cast<std::ptrdiff_t>(r) * window);
    }
    const nn::Tensor z = agents.phi().infer(x);
    for (int r = 0; r < n; ++r) {
      for (int k = 0; k < agents::kLatentDim; ++k) {
        const double d = z[static_cast<size_t>(r * agents::kLatentDim + k)] -
                         buf.targets[static_cast<size_t>(rows[start + r]) * agents::kLatentDim + k];
        total += d * d;
      }
    }
  }
  return total / static_cast<double>(rows.size());
}

PhaseOutput train_phase2(const TrainConfig& cfg, const io::Checkpoint& phase1, const fs::path& out_dir) {
  cfg.validate();
  if (phase1.phase() != io::PhaseTag::kPhase1) throw CheckpointError("phase 2 needs a phase-1 checkpoint");
  agents::AgentSet agents = io::agents_from_checkpoint(phase1, agents::kPolicy | agents::kEncoder | agents::kCritic);
  std::mt19937_64 init_rng(derive_seed(cfg.seed, 2));
  agents.phi().init(init_rng);
  const uint64_t mu_hash = agents.hash(agents::kEncoder);
  const uint64_t pi_hash = agents.hash(agents::kPolicy);

  const Phase2Config& p2 = cfg.phase2;
  fs::create_directories(out_dir);
  const fs::path ckpt_path = out_dir / "phase2.ckpt";
  RunRecordWriter writer(out_dir / "phase2.csv", cfg.config_hash, cfg.seed, "phase2", false);

  nn::AdamConfig adam_cfg;
  adam_cfg.lr = p2.lr;
  const std::vector<nn::Parameter*> params = agents.parameters(agents::kAdaptation);
  nn::Adam adam(params, adam_cfg);
  VecEnv envs(p2.num_envs, cfg.env, derive_seed(cfg.seed, 2 * 1000003ULL), agents::LatentSource::kEstimated);
  envs.set_imitation_multiplier(cfg.imitation_floor);
  std::mt19937_64 shuffle(derive_seed(cfg.seed, 2 * 1000003ULL + 500000ULL));
  RolloutOptions opts;
  opts.source = agents::LatentSource::kEstimated;
  opts.record_windows = true;
  opts.gamma = cfg.ppo.gamma;
  opts.workers = cfg.workers;

  PhaseOutput out;
  std::vector<double> mses;
  auto save = [&](int iteration) {
    nlohmann::json meta = base_metadata(cfg, iteration);
    meta["initial_mse"] = out.initial_mse;
    meta["final_mse"] = out.final_mse;
    meta["phase1_mu_hash"] = hex64(mu_hash);
    meta["phase1_pi_hash"] = hex64(pi_hash);
    io::Checkpoint ck = io::make_checkpoint(agents, agents::kAdaptation, io::PhaseTag::kPhase2, meta);
    io::add_optimizer_state(ck, "adam", adam.state());
    io::save_checkpoint(ckpt_path, ck);
    return ck;
  };

  Progress progress("phase2", cfg.log_every);
  RolloutBuffer buf;
  const int window = agents::kHistoryLength * agents::kHistoryChannels;
  double last_return = 0.0;
  for (int it = 0; it < p2.iterations; ++it) {
    envs.collect(agents, buf, p2.batch / p2.num_envs, opts);
    // NaN when no sample in the batch has a full history yet.
    const double mse = latent_mse(agents, buf);
    if (!std::isnan(mse)) {
      if (mses.empty()) out.initial_mse = mse;
      if (!std::isfinite(mse) || mse > p2.divergence_factor * out.initial_mse) {
        throw DivergenceError("phase 2 diverged at iteration " + std::to_string(it) + ": held-out MSE " +
                              std::to_string(mse) + " vs initial " + std::to_string(out.initial_mse));
      }
      mses.push_back(mse);
    }

    std::vector<int> rows;
    for (int i = 0; i < buf.size(); ++i) {
      if (buf.warm[static_cast<size_t>(i)]) rows.push_back(i);
    }
    for (int epoch = 0; epoch < p2.epochs; ++epoch) {
      std::shuffle(rows.begin(), rows.end(), shuffle);
      for (size_t start = 0; start < rows.size(); start += static_cast<size_t>(p2.minibatch)) {
        const int n = static_cast<int>(std::min<size_t>(static_cast<size_t>(p2.minibatch), rows.size() - start));
        nn::Tensor x({n, agents::kHistoryLength, agents::kHistoryChannels});
        nn::Tensor target({n, agents::kLatentDim});
        for (int r = 0; r < n; ++r) {
          const auto row = static_cast<std::ptrdiff_t>(rows[start + static_cast<size_t>(r)]);
          std::copy_n(buf.windows.begin() + row * window, window, x.data() + static_cast<std::ptrdiff_t>(r) * window);
          std::copy_n(buf.targets.begin() + row * agents::kLatentDim, agents::kLatentDim,
                      target.data() + static_cast<std::ptrdiff_t>(r) * agents::kLatentDim);
        }
        nn::Tape tape;
        nn::Var z_hat = agents.phi().forward(tape, tape.constant(x));
        nn::Var loss = scale(mean(square(z_hat - tape.constant(target))), static_cast<float>(agents::kLatentDim));
        adam.zero_grad();
        tape.backward(loss);
        adam.step();
      }
    }
    last_return = mean_of(buf.episode_returns, last_return);

    IterationRecord rec;
    rec.iter = it;
    rec.return_mean = last_return;
    rec.pg_loss = std::numeric_limits<double>::quiet_NaN();
    rec.v_loss = std::numeric_limits<double>::quiet_NaN();
    rec.mse = mse;
    rec.imit_mult = cfg.imitation_floor;
    rec.seconds = static_cast<double>(it + 1) * p2.batch * env::kControlDt;
    writer.write(rec);
    out.records.push_back(rec);

    const size_t k = std::min<size_t>(static_cast<size_t>(p2.smoothing), mses.size());
    if (k > 0) {
      out.final_mse =
          std::accumulate(mses.end() - static_cast<std::ptrdiff_t>(k), mses.end(), 0.0) / static_cast<double>(k);
    }
    if ((it + 1) % cfg.checkpoint_every == 0 || it + 1 == p2.iterations) out.checkpoint = save(it + 1);
    char line[128];
    std::snprintf(line, sizeof(line), "mse %.5f (initial %.5f, smoothed %.5f) return %.2f", mse, out.initial_mse,
                  out.final_mse, last_return);
    progress.report(it, p2.iterations, line);
  }
  if (agents.hash(agents::kEncoder) != mu_hash || agents.hash(agents::kPolicy) != pi_hash) {
    throw ContractError("phase 2 modified frozen modules");
  }
  return out;
}

PhaseOutput train_phase3(const TrainConfig& cfg, const io::Checkpoint& phase1, const io::Checkpoint& phase2,
                         const fs::path& out_dir, bool resume) {
  cfg.validate();
  if (phase1.phase() != io::PhaseTag::kPhase1) throw CheckpointError("phase 3 needs a phase-1 checkpoint");
  if (phase2.phase() != io::PhaseTag::kPhase2) throw CheckpointError("phase 3 needs a phase-2 checkpoint");
  agents::AgentSet agents = io::agents_from_checkpoint(phase1, agents::kPolicy | agents::kEncoder | agents::kCritic);
  io::restore(agents, phase2, agents::kAdaptation);
  const uint64_t phi_hash = agents.hash(agents::kAdaptation);
  const uint64_t mu_hash = agents.hash(agents::kEncoder);

  PpoPhaseSpec spec{"phase3",
                    io::PhaseTag::kPhase3,
                    agents::LatentSource::kEstimated,
                    LatentInput::kStored,
                    cfg.phase3_iterations,
                    false,
                    agents::kAllModules,
                    3};
  spec.extra = {{"phi_hash", hex64(phi_hash)}, {"mu_hash", hex64(mu_hash)}};
  PhaseOutput out = run_ppo_phase(cfg, agents, spec, out_dir, resume);
  if (agents.hash(agents::kAdaptation) != phi_hash || agents.hash(agents::kEncoder) != mu_hash) {
    throw ContractError("phase 3 modified the frozen adaptation module or encoder");
  }
  return out;
}

}  // namespace arma::train
