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

#include "arma/eval/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "arma/errors.hpp"
#include "arma/io/checkpoint.hpp"
#include "arma/train/rollout.hpp"

namespace arma::eval {

namespace fs = std::filesystem;
using train::derive_seed;

namespace {

constexpr int kJoints = env::kNumJoints;

// Stream offsets so metric families never share seeds.
constexpr uint64_t kEpisodeStream = 0;
constexpr uint64_t kCellStream = 1000;
constexpr uint64_t kFrictionStream = 2000;

int ticks(double seconds) { return static_cast<int>(std::lround(seconds * env::kControlHz)); }

}  // namespace

const char* mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::kPriv:
      return "priv";
    case EvalMode::kRma:
      return "rma";
    case EvalMode::kArma:
      return "arma";
    case EvalMode::kStatic:
      return "static";
    case EvalMode::kRobust:
      return "robust";
  }
  return "?";
}

EvalMode parse_mode(std::string_view name) {
  for (EvalMode m : all_modes()) {
    if (name == mode_name(m)) return m;
  }
  throw ConfigError("unknown eval mode '" + std::string(name) + "' (expected priv, rma, arma, static or robust)");
}

std::vector<EvalMode> parse_modes(std::string_view list) {
  std::vector<EvalMode> out;
  size_t start = 0;
  while (start <= list.size()) {
    const size_t end = std::min(list.find(',', start), list.size());
    out.push_back(parse_mode(list.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::vector<EvalMode> all_modes() {
  return {EvalMode::kPriv, EvalMode::kRma, EvalMode::kArma, EvalMode::kStatic, EvalMode::kRobust};
}

PolicyController::PolicyController(std::shared_ptr<const agents::AgentSet> agents, agents::LatentSource source)
    : agents_(std::move(agents)), tracker_(source) {}

void PolicyController::begin_episode(const env::BipedEnv& env) {
  builder_.reset();
  tracker_.reset();
  const agents::ScaledProprio p = agents::scale_proprio(env.proprio());
  builder_.push_proprio(p);
  tracker_.observe(p, env::JointVector{});
  obs_ = builder_.build(env.lookahead(), env.command());
}

env::JointVector PolicyController::act(const env::BipedEnv& env) {
  const auto e = env.params().flattened();
  const agents::Latent z = tracker_.latent(*agents_, e);
  const agents::Latent* zp = agents_->config().use_latent ? &z : nullptr;
  const auto mean = agents_->policy_mean(obs_, zp);
  env::JointVector a;
  for (int j = 0; j < kJoints; ++j) a[static_cast<size_t>(j)] = mean[static_cast<size_t>(j)];
  return a;
}

void PolicyController::observe(const env::BipedEnv& env, const env::JointVector& action) {
  const agents::ScaledProprio p = agents::scale_proprio(env.proprio());
  builder_.push_action(action);
  builder_.push_proprio(p);
  tracker_.observe(p, action);
  obs_ = builder_.build(env.lookahead(), env.command());
}

ControllerFactory LoadedController::factory() const {
  auto a = agents;
  auto s = source;
  return [a, s] { return std::make_unique<PolicyController>(a, s); };
}

LoadedController load_controller(EvalMode mode, const fs::path& dir) {
  using agents::kAdaptation;
  using agents::kAllModules;
  using agents::kEncoder;
  using agents::kPolicy;
  LoadedController out{mode, nullptr, agents::LatentSource::kNone};
  switch (mode) {
    case EvalMode::kPriv: {
      const io::Checkpoint p1 = io::load_checkpoint(dir / "phase1.ckpt", io::PhaseTag::kPhase1);
      out.agents = std::make_shared<agents::AgentSet>(io::agents_from_checkpoint(p1, kPolicy | kEncoder));
      out.source = agents::LatentSource::kPrivileged;
      break;
    }
    case EvalMode::kRma: {
      const io::Checkpoint p1 = io::load_checkpoint(dir / "phase1.ckpt", io::PhaseTag::kPhase1);
      const io::Checkpoint p2 = io::load_checkpoint(dir / "phase2.ckpt", io::PhaseTag::kPhase2);
      auto a = std::make_shared<agents::AgentSet>(io::agents_from_checkpoint(p1, kPolicy | kEncoder));
      io::restore(*a, p2, kAdaptation);
      out.agents = std::move(a);
      out.source = agents::LatentSource::kEstimated;
      break;
    }
    case EvalMode::kArma:
    case EvalMode::kStatic: {
      const io::Checkpoint p3 = io::load_checkpoint(dir / "phase3.ckpt", io::PhaseTag::kPhase3);
      out.agents = std::make_shared<agents::AgentSet>(io::agents_from_checkpoint(p3, kAllModules));
      out.source = mode == EvalMode::kArma ? agents::LatentSource::kEstimated : agents::LatentSource::kStatic;
      break;
    }
    case EvalMode::kRobust: {
      const io::Checkpoint r = io::load_checkpoint(dir / "robust.ckpt", io::PhaseTag::kRobust);
      out.agents = std::make_shared<agents::AgentSet>(io::agents_from_checkpoint(r, kPolicy));
      if (out.agents->config().use_latent) throw CheckpointError("robust.ckpt holds a latent-conditioned policy");
      break;
    }
  }
  return out;
}

EpisodeTrace run_episode(Controller& controller, const EpisodeSpec& spec, std::ostream* trajectory) {
  env::EnvConfig cfg = spec.config;
  cfg.max_steps = spec.max_steps;
  env::BipedEnv env(cfg, spec.seed);
  if (spec.params || spec.command || spec.terrain) {
    env.reset(spec.params.value_or(env::EnvParams{}), spec.command.value_or(env::Command{}),
              spec.terrain.value_or(env::Terrain::flat()));
  } else {
    env.reset();
  }
  std::optional<env::TrajectoryWriter> writer;
  if (trajectory != nullptr) writer.emplace(*trajectory);

  EpisodeTrace tr;
  const auto push_joints = [&] {
    for (int j = 0; j < kJoints; ++j) tr.joints.push_back(env.state().q[static_cast<size_t>(3 + j)]);
  };
  push_joints();
  controller.begin_episode(env);
  for (;;) {
    const env::JointVector action = controller.act(env);
    const env::StepResult r = env.step(action);
    if (writer) writer->write(env, r);
    ++tr.steps;
    tr.episode_return += r.reward;
    if (r.diverged) {
      tr.fell = true;
      break;
    }
    push_joints();
    tr.speed.push_back(env.state().qd[0]);
    tr.height.push_back(env.state().q[1] - env.ground_height());
    tr.command_speed.push_back(env.command().speed);
    tr.command_height.push_back(env.command().height);
    if (r.done) {
      tr.fell = r.fell;
      break;
    }
    controller.observe(env, action);
  }
  return tr;
}

double mean_time_to_fall(std::span<const EpisodeTrace> episodes, double timeout) {
  if (episodes.empty()) throw MetricError("mean time to fall of zero episodes");
  double total = 0.0;
  for (const EpisodeTrace& e : episodes) total += e.fell ? std::min(e.duration(), timeout) : timeout;
  return total / static_cast<double>(episodes.size());
}

double mean_return(std::span<const EpisodeTrace> episodes) {
  if (episodes.empty()) throw MetricError("mean return of zero episodes");
  double total = 0.0;
  for (const EpisodeTrace& e : episodes) total += e.episode_return;
  return total / static_cast<double>(episodes.size());
}

namespace {

// Sum of |third difference| / dt^3 and the number of terms.
std::pair<double, size_t> jerk_sum(std::span<const double> q, int joints, double dt) {
  const size_t n = q.size() / static_cast<size_t>(joints);
  const size_t J = static_cast<size_t>(joints);
  const double inv = 1.0 / (dt * dt * dt);
  double total = 0.0;
  for (size_t t = 0; t + 3 < n; ++t) {
    for (size_t j = 0; j < J; ++j) {
      const double d = q[(t + 3) * J + j] - 3.0 * q[(t + 2) * J + j] + 3.0 * q[(t + 1) * J + j] - q[t * J + j];
      total += std::abs(d) * inv;
    }
  }
  return {total, (n - 3) * J};
}

}  // namespace

double mean_jerk(std::span<const double> positions, int joints, double dt) {
  if (joints <= 0 || positions.size() % static_cast<size_t>(joints) != 0) {
    throw MetricError("joint trajectory is not a whole number of samples");
  }
  const size_t n = positions.size() / static_cast<size_t>(joints);
  if (n < 4) throw MetricError("jerk needs at least 4 samples, got " + std::to_string(n));
  const auto [total, count] = jerk_sum(positions, joints, dt);
  return total / static_cast<double>(count);
}

double mean_jerk(std::span<const EpisodeTrace> episodes) {
  double total = 0.0;
  size_t count = 0;
  for (const EpisodeTrace& e : episodes) {
    if (e.joints.size() < 4 * static_cast<size_t>(kJoints)) continue;
    const auto [s, c] = jerk_sum(e.joints, kJoints, env::kControlDt);
    total += s;
    count += c;
  }
  if (count == 0) throw MetricError("no episode long enough for jerk");
  return total / static_cast<double>(count);
}

std::vector<env::Command> command_grid() {
  std::vector<env::Command> out;
  for (int h = 0; h < 8; ++h) {
    for (int s = 0; s < 21; ++s) out.push_back({-1.0 + 0.1 * s, 0.65 + 0.05 * h});
  }
  return out;
}

CellOutcome score_cell(const env::Command& command, std::span<const EpisodeTrace> trials, double transient) {
  CellOutcome c;
  c.command = command;
  c.feasible = !trials.empty();
  double ex = 0.0, ez = 0.0;
  size_t n = 0;
  const size_t skip = static_cast<size_t>(ticks(transient));
  for (const EpisodeTrace& t : trials) {
    if (t.fell) c.feasible = false;
    for (size_t i = skip; i < t.speed.size(); ++i) {
      ex += std::abs(t.command_speed[i] - t.speed[i]);
      ez += std::abs(t.command_height[i] - t.height[i]);
      ++n;
    }
  }
  if (n > 0) {
    c.error_x = ex / static_cast<double>(n);
    c.error_z = ez / static_cast<double>(n);
  }
  return c;
}

TrackingResult summarize_tracking(std::span<const CellOutcome> cells) {
  TrackingResult r;
  r.cells = static_cast<int>(cells.size());
  double ex = 0.0, ez = 0.0;
  for (const CellOutcome& c : cells) {
    if (!c.feasible) continue;
    ++r.feasible;
    ex += c.error_x;
    ez += c.error_z;
  }
  r.feasible_fraction = r.cells > 0 ? static_cast<double>(r.feasible) / r.cells : 0.0;
  if (r.feasible == 0) {
    r.error_x = r.error_z = r.error_pooled = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.error_x = ex / r.feasible;
    r.error_z = ez / r.feasible;
    r.error_pooled = 0.5 * (r.error_x + r.error_z);
  }
  return r;
}

std::optional<double> friction_line_search(const std::function<bool(double)>& passes, double start, double step,
                                           double floor) {
  std::optional<double> best;
  for (int k = 0;; ++k) {
    const double f = start - step * k;
    if (f < floor - 1e-9) break;
    if (!passes(f)) break;
    best = f;
  }
  return best;
}

void EvalConfig::validate() const {
  if (seeds <= 0 || episodes <= 0) throw ConfigError("eval.seeds and eval.episodes must be positive");
  if (!(timeout > 0.0) || !(feasibility_time > 0.0) || !(friction_time > 0.0)) {
    throw ConfigError("eval durations must be positive");
  }
  if (transient < 0.0 || transient >= feasibility_time) {
    throw ConfigError("eval.transient must lie in [0, feasibility_time)");
  }
  if (cell_trials <= 0) throw ConfigError("eval.cell_trials must be positive");
  if (!(friction_step > 0.0) || friction_floor <= 0.0 || friction_start < friction_floor) {
    throw ConfigError("eval friction scan needs start >= floor > 0 and a positive step");
  }
  if (friction_trials <= 0 || friction_required <= 0 || friction_required > friction_trials) {
    throw ConfigError("eval.friction_required must lie in [1, friction_trials]");
  }
  if (imitation_multiplier < 0.0 || imitation_multiplier > 1.0) {
    throw ConfigError("eval.imitation_multiplier must lie in [0, 1]");
  }
  if (workers <= 0) throw ConfigError("workers must be positive");
}

double median(std::vector<double> v) {
  if (v.empty()) throw MetricError("median of empty set");
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

namespace {

env::EnvConfig eval_env(const EvalConfig& cfg) {
  env::EnvConfig e = cfg.env;
  e.reward.imitation_multiplier = cfg.imitation_multiplier;
  return e;
}

std::vector<EpisodeTrace> randomized_episodes(const ControllerFactory& make, const EvalConfig& cfg, uint64_t seed,
                                              int n) {
  const env::EnvConfig base = eval_env(cfg);
  const uint64_t stream = derive_seed(seed, kEpisodeStream);
  return parallel_map<EpisodeTrace>(n, cfg.workers, [&](int i) {
    EpisodeSpec spec;
    spec.config = base;
    spec.seed = derive_seed(stream, static_cast<uint64_t>(i));
    spec.max_steps = ticks(cfg.timeout);
    auto c = make();
    return run_episode(*c, spec);
  });
}

}  // namespace

double evaluate_mttf(const ControllerFactory& make, const EvalConfig& cfg, uint64_t seed, int n,
                     std::vector<EpisodeTrace>* traces) {
  std::vector<EpisodeTrace> eps = randomized_episodes(make, cfg, seed, n);
  const double m = mean_time_to_fall(eps, cfg.timeout);
  if (traces != nullptr) *traces = std::move(eps);
  return m;
}

TrackingResult evaluate_tracking(const ControllerFactory& make, const EvalConfig& cfg, std::vector<CellOutcome>* cells) {
  const std::vector<env::Command> grid = command_grid();
  env::EnvConfig base = eval_env(cfg);
  base.resample_command = false;
  base.resample_params = false;
  const int jobs = static_cast<int>(grid.size()) * cfg.cell_trials;
  const std::vector<EpisodeTrace> runs = parallel_map<EpisodeTrace>(jobs, cfg.workers, [&](int k) {
    const int cell = k / cfg.cell_trials;
    const int trial = k % cfg.cell_trials;
    EpisodeSpec spec;
    spec.config = base;
    spec.seed = derive_seed(derive_seed(cfg.seed, kCellStream + static_cast<uint64_t>(trial)),
                            static_cast<uint64_t>(cell));
    spec.max_steps = ticks(cfg.feasibility_time);
    spec.params = env::EnvParams{};
    spec.command = grid[static_cast<size_t>(cell)];
    spec.terrain = env::Terrain::flat();
    auto c = make();
    return run_episode(*c, spec);
  });
  std::vector<CellOutcome> out;
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto begin = runs.begin() + static_cast<std::ptrdiff_t>(i * static_cast<size_t>(cfg.cell_trials));
    out.push_back(score_cell(grid[i], std::span<const EpisodeTrace>(&*begin, static_cast<size_t>(cfg.cell_trials)),
                             cfg.transient));
  }
  const TrackingResult r = summarize_tracking(out);
  if (cells != nullptr) *cells = std::move(out);
  return r;
}

std::optional<double> evaluate_min_friction(const ControllerFactory& make, const EvalConfig& cfg) {
  env::EnvConfig base = eval_env(cfg);
  base.resample_command = false;
  base.resample_params = false;
  // Trial conditions are shared across friction values; only friction moves.
  std::vector<env::EnvParams> params;
  const uint64_t stream = derive_seed(cfg.seed, kFrictionStream);
  for (int t = 0; t < cfg.friction_trials; ++t) {
    std::mt19937_64 rng(derive_seed(stream, static_cast<uint64_t>(t)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    params.push_back(env::sample_env_params([&] { return u(rng); }));
  }
  const auto passes = [&](double friction) {
    const std::vector<int> up = parallel_map<int>(cfg.friction_trials, cfg.workers, [&](int t) {
      EpisodeSpec spec;
      spec.config = base;
      spec.seed = derive_seed(stream, static_cast<uint64_t>(1000 + t));
      spec.max_steps = ticks(cfg.friction_time);
      spec.params = params[static_cast<size_t>(t)];
      spec.params->friction_ratio = friction;
      spec.command = env::Command{cfg.friction_speed, env::Command{}.height};
      spec.terrain = env::Terrain::flat();
      auto c = make();
      return run_episode(*c, spec).fell ? 0 : 1;
    });
    int survived = 0;
    for (int s : up) survived += s;
    return survived >= cfg.friction_required;
  };
  return friction_line_search(passes, cfg.friction_start, cfg.friction_step, cfg.friction_floor);
}

MetricReport evaluate(EvalMode mode, const ControllerFactory& make, const EvalConfig& cfg) {
  cfg.validate();
  MetricReport rep;
  rep.mode = mode;
  rep.episodes_per_seed = cfg.episodes;
  std::vector<double> mttf, ret, jerk;
  for (int k = 0; k < cfg.seeds; ++k) {
    SeedMetrics m;
    m.seed = derive_seed(cfg.seed, static_cast<uint64_t>(k));
    std::vector<EpisodeTrace> eps;
    m.mttf = evaluate_mttf(make, cfg, m.seed, cfg.episodes, &eps);
    m.mean_return = mean_return(eps);
    m.jerk = mean_jerk(eps);
    mttf.push_back(m.mttf);
    ret.push_back(m.mean_return);
    jerk.push_back(m.jerk);
    rep.per_seed.push_back(m);
  }
  rep.mttf = median(mttf);
  rep.mean_return = median(ret);
  rep.jerk = median(jerk);
  rep.tracking = evaluate_tracking(make, cfg);
  rep.cell_trials = cfg.cell_trials;
  rep.min_friction = evaluate_min_friction(make, cfg);
  rep.friction_trials = cfg.friction_trials;
  return rep;
}

std::vector<MetricReport> compare(std::span<const EvalMode> modes, const fs::path& ckpt_dir, const EvalConfig& cfg) {
  cfg.validate();
  // Load everything first so a missing file fails before any compute.
  std::vector<LoadedController> loaded;
  for (EvalMode m : modes) loaded.push_back(load_controller(m, ckpt_dir));
  std::vector<MetricReport> out;
  for (const LoadedController& l : loaded) out.push_back(evaluate(l.mode, l.factory(), cfg));
  return out;
}

void write_bench_csv(const fs::path& path, std::span<const MetricReport> reports, uint64_t config_hash, uint64_t seed) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
  out << "# config_hash=" << buf << " seed=" << seed << "\n";
  out << "mode,mttf,return,track_x,feasible,jerk,minfric,seed_set\n";
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  for (const MetricReport& r : reports) {
    std::string seeds;
    for (const SeedMetrics& s : r.per_seed) {
      if (!seeds.empty()) seeds += ';';
      seeds += std::to_string(s.seed);
    }
    out << mode_name(r.mode) << ',' << num(r.mttf) << ',' << num(r.mean_return) << ',' << num(r.tracking.error_x) << ','
        << num(r.tracking.feasible_fraction) << ',' << num(r.jerk / 1000.0) << ','
        << (r.min_friction ? num(*r.min_friction) : std::string(kAboveTrainingRange)) << ',' << seeds << '\n';
  }
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace arma::eval
