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

#ifndef ARMA_EVAL_EVAL_HPP_
#define ARMA_EVAL_EVAL_HPP_

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "arma/agents/agent_set.hpp"
#include "arma/agents/observation.hpp"
#include "arma/env/biped_env.hpp"

namespace arma::eval {

enum class EvalMode { kPriv, kRma, kArma, kStatic, kRobust };

const char* mode_name(EvalMode mode);
EvalMode parse_mode(std::string_view name);
// Comma-separated list, e.g. "priv,rma,arma".
std::vector<EvalMode> parse_modes(std::string_view list);
std::vector<EvalMode> all_modes();

class Controller {
 public:
  virtual ~Controller() = default;
  virtual void begin_episode(const env::BipedEnv& env) = 0;
  virtual env::JointVector act(const env::BipedEnv& env) = 0;
  // Called after every step that did not end the episode.
  virtual void observe(const env::BipedEnv& env, const env::JointVector& action) = 0;
};

using ControllerFactory = std::function<std::unique_ptr<Controller>()>;

// Mean-action policy with its own observation history and latent tracker.
class PolicyController : public Controller {
 public:
  PolicyController(std::shared_ptr<const agents::AgentSet> agents, agents::LatentSource source);

  void begin_episode(const env::BipedEnv& env) override;
  env::JointVector act(const env::BipedEnv& env) override;
  void observe(const env::BipedEnv& env, const env::JointVector& action) override;

 private:
  std::shared_ptr<const agents::AgentSet> agents_;
  agents::ObservationBuilder builder_;
  agents::LatentTracker tracker_;
  agents::Observation obs_{};
};

struct LoadedController {
  EvalMode mode;
  std::shared_ptr<const agents::AgentSet> agents;
  agents::LatentSource source;

  ControllerFactory factory() const;
};

// Reads the checkpoints a mode needs from `dir` (phase1.ckpt, phase2.ckpt,
// phase3.ckpt, robust.ckpt). A missing or mismatched file raises
// CheckpointError naming it.
LoadedController load_controller(EvalMode mode, const std::filesystem::path& dir);

struct EpisodeSpec {
  env::EnvConfig config;
  uint64_t seed = 0;
  int max_steps = 600;
  // Explicit conditions; when unset the env draws them from its config.
  std::optional<env::EnvParams> params;
  std::optional<env::Command> command;
  std::optional<env::Terrain> terrain;
};

struct EpisodeTrace {
  int steps = 0;
  bool fell = false;
  double episode_return = 0.0;
  // Row-major [ticks x 6] joint positions including the initial pose.
  std::vector<double> joints;
  // Per control tick after each step.
  std::vector<double> speed;
  std::vector<double> height;
  std::vector<double> command_speed;
  std::vector<double> command_height;

  double duration() const { return steps * env::kControlDt; }
};

EpisodeTrace run_episode(Controller& controller, const EpisodeSpec& spec, std::ostream* trajectory = nullptr);

// Runs fn(i) for i in [0, n) over `workers` threads; results in index order.
template <typename T>
std::vector<T> parallel_map(int n, int workers, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<size_t>(n));
  const int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(w));
  std::vector<std::thread> threads;
  for (int t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += w) out[static_cast<size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  }
  for (std::thread& th : threads) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Time to fall with survivors censored at the timeout.
double mean_time_to_fall(std::span<const EpisodeTrace> episodes, double timeout);
double mean_return(std::span<const EpisodeTrace> episodes);

// Mean over joints and samples of |q[t+3] - 3q[t+2] + 3q[t+1] - q[t]| / dt^3,
// the third difference centred at t + 3/2. Positions are row-major
// [samples x joints]; fewer than 4 samples raises MetricError. rad/s^3.
double mean_jerk(std::span<const double> positions, int joints, double dt);
// Sample-weighted over episodes that are long enough.
double mean_jerk(std::span<const EpisodeTrace> episodes);

struct CellOutcome {
  env::Command command;
  bool feasible = false;
  double error_x = 0.0;  // mean |desired - actual| forward speed, m/s
  double error_z = 0.0;  // mean |desired - actual| pelvis height, m
};

struct TrackingResult {
  int cells = 0;
  int feasible = 0;
  double feasible_fraction = 0.0;
  // Means over feasible cells only; NaN when none is feasible.
  double error_x = 0.0;
  double error_z = 0.0;
  double error_pooled = 0.0;
};

// Speed -1.0..1.0 step 0.1 by height 0.65..1.0 step 0.05.
std::vector<env::Command> command_grid();
// Errors averaged over ticks at or after `transient` seconds.
CellOutcome score_cell(const env::Command& command, std::span<const EpisodeTrace> trials, double transient);
TrackingResult summarize_tracking(std::span<const CellOutcome> cells);

// Descending scan start, start - step, ... down to floor. Returns the lowest
// value that passes before the first failure; nullopt when `start` fails.
std::optional<double> friction_line_search(const std::function<bool(double)>& passes, double start, double step,
                                           double floor);
inline constexpr std::string_view kAboveTrainingRange = "above-training-range";

struct EvalConfig {
  uint64_t seed = 1;
  int seeds = 5;
  int episodes = 10;
  double timeout = 20.0;
  double imitation_multiplier = 0.3;

  double feasibility_time = 10.0;
  double transient = 2.0;
  int cell_trials = 1;

  double friction_start = 0.3;
  double friction_step = 0.05;
  double friction_floor = 0.05;
  double friction_speed = 0.5;
  double friction_time = 10.0;
  int friction_trials = 5;
  int friction_required = 4;

  int workers = 1;
  env::EnvConfig env;

  void validate() const;
  // Three trials per tracking cell.
  void make_thorough() { cell_trials = 3; }
};

struct SeedMetrics {
  uint64_t seed = 0;
  double mttf = 0.0;
  double mean_return = 0.0;
  double jerk = 0.0;  // rad/s^3
};

struct MetricReport {
  EvalMode mode = EvalMode::kArma;
  std::vector<SeedMetrics> per_seed;
  int episodes_per_seed = 0;
  // Medians over seeds.
  double mttf = 0.0;
  double mean_return = 0.0;
  double jerk = 0.0;
  TrackingResult tracking;
  int cell_trials = 0;
  std::optional<double> min_friction;
  int friction_trials = 0;
};

double median(std::vector<double> values);

double evaluate_mttf(const ControllerFactory& make, const EvalConfig& cfg, uint64_t seed, int n,
                     std::vector<EpisodeTrace>* traces = nullptr);
TrackingResult evaluate_tracking(const ControllerFactory& make, const EvalConfig& cfg,
                                 std::vector<CellOutcome>* cells = nullptr);
std::optional<double> evaluate_min_friction(const ControllerFactory& make, const EvalConfig& cfg);

MetricReport evaluate(EvalMode mode, const ControllerFactory& make, const EvalConfig& cfg);
std::vector<MetricReport> compare(std::span<const EvalMode> modes, const std::filesystem::path& ckpt_dir,
                                  const EvalConfig& cfg);

// bench.csv: a "# config_hash=... seed=..." line, then
// mode,mttf,return,track_x,feasible,jerk,minfric,seed_set
// with jerk in krad/s^3 and seeds joined by ';'.
void write_bench_csv(const std::filesystem::path& path, std::span<const MetricReport> reports, uint64_t config_hash,
                     uint64_t seed);

}  // namespace arma::eval

#endif  // ARMA_EVAL_EVAL_HPP_
