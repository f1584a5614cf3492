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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "arma/agents/gradcheck_suite.hpp"
#include "arma/errors.hpp"
#include "arma/eval/eval.hpp"
#include "arma/io/checkpoint.hpp"
#include "arma/io/config.hpp"
#include "arma/train/phases.hpp"
#include "arma/train/rollout.hpp"

namespace {

namespace fs = std::filesystem;
using namespace arma;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "TOML-style configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override a key, e.g. --set ppo.lr=1e-4");
  cmd->add_option("--seed", c.seed, "Seed (falls back to the config, then $ARMA_SEED)");
}

io::RunConfig load(const Common& c) {
  if (c.config.empty()) return io::parse_config_text("", c.overrides);
  return io::parse_config(c.config, c.overrides);
}

std::string hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int run_train(const Common& c, const std::string& phase, const fs::path& out, std::optional<fs::path> from,
              bool resume) {
  const io::RunConfig rc = load(c);
  train::TrainConfig cfg = rc.train_config(io::resolve_seed(c.seed, rc));
  cfg.workers = c.workers;
  const fs::path inputs = from.value_or(out);
  std::fprintf(stderr, "train phase %s seed %llu config %s workers %d\n", phase.c_str(),
               static_cast<unsigned long long>(cfg.seed), hex(cfg.config_hash).c_str(), cfg.workers);
  train::PhaseOutput result;
  if (phase == "1") {
    result = train::train_phase1(cfg, out, resume);
  } else if (phase == "2") {
    if (resume) throw ConfigError("phase 2 has no resumable state; rerun it from the phase-1 checkpoint");
    const io::Checkpoint p1 = io::load_checkpoint(inputs / "phase1.ckpt", io::PhaseTag::kPhase1);
    result = train::train_phase2(cfg, p1, out);
    std::printf("phase2 mse initial %.6g final %.6g ratio %.4f\n", result.initial_mse, result.final_mse,
                result.final_mse / result.initial_mse);
  } else if (phase == "3") {
    const io::Checkpoint p1 = io::load_checkpoint(inputs / "phase1.ckpt", io::PhaseTag::kPhase1);
    const io::Checkpoint p2 = io::load_checkpoint(inputs / "phase2.ckpt", io::PhaseTag::kPhase2);
    result = train::train_phase3(cfg, p1, p2, out, resume);
  } else {
    result = train::train_robust(cfg, out, resume);
  }
  if (!result.records.empty()) {
    const auto& last = result.records.back();
    std::printf("phase %s done: %zu iterations, last return %.4g\n", phase.c_str(), result.records.size(),
                last.return_mean);
  }
  return 0;
}

int run_eval(const Common& c, const std::string& modes, const fs::path& ckpt_dir, const fs::path& csv, bool thorough) {
  const io::RunConfig rc = load(c);
  const uint64_t seed = io::resolve_seed(c.seed, rc);
  eval::EvalConfig cfg = rc.eval_config(seed);
  cfg.workers = c.workers;
  if (thorough) cfg.make_thorough();
  const std::vector<eval::EvalMode> list = eval::parse_modes(modes);
  const std::vector<eval::MetricReport> reports = eval::compare(list, ckpt_dir, cfg);
  eval::write_bench_csv(csv, reports, rc.hash(), seed);
  std::printf("%-7s %8s %9s %8s %8s %8s %9s %10s %8s\n", "mode", "mttf_s", "return", "track_x", "track_z", "pooled",
              "feasible", "jerk_k", "minfric");
  for (const auto& r : reports) {
    const std::string mf = r.min_friction ? std::to_string(*r.min_friction).substr(0, 4) : "above";
    std::printf("%-7s %8.2f %9.2f %8.3f %8.3f %8.3f %9.3f %10.3f %8s\n", eval::mode_name(r.mode), r.mttf,
                r.mean_return, r.tracking.error_x, r.tracking.error_z, r.tracking.error_pooled,
                r.tracking.feasible_fraction, r.jerk / 1000.0, mf.c_str());
  }
  std::printf("wrote %s\n", csv.string().c_str());
  return 0;
}

int run_gradcheck() {
  double worst = 0.0;
  for (const auto& e : agents::gradcheck_suite(agents::AgentConfig{})) {
    std::printf("%-10s seed %llu max rel error %.3e\n", e.network.c_str(), static_cast<unsigned long long>(e.seed),
                e.max_rel_error);
    worst = std::max(worst, e.max_rel_error);
  }
  std::printf("max rel error %.3e\n", worst);
  return worst < 1e-3 ? 0 : 1;
}

int run_rollout(const Common& c, const std::string& mode_name, int episodes, const fs::path& ckpt_dir,
                const fs::path& dump_dir) {
  const io::RunConfig rc = load(c);
  const uint64_t seed = io::resolve_seed(c.seed, rc);
  const eval::EvalConfig cfg = rc.eval_config(seed);
  const eval::EvalMode mode = eval::parse_mode(mode_name);
  const eval::ControllerFactory make = eval::load_controller(mode, ckpt_dir).factory();
  fs::create_directories(dump_dir);
  env::EnvConfig env_cfg = cfg.env;
  env_cfg.reward.imitation_multiplier = cfg.imitation_multiplier;
  std::vector<std::string> summaries = eval::parallel_map<std::string>(episodes, c.workers, [&](int i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_episode_%03d.csv", eval::mode_name(mode), i);
    std::ofstream out(dump_dir / name, std::ios::trunc);
    out << "# mode=" << eval::mode_name(mode) << " config_hash=" << hex(rc.hash()) << " seed=" << seed
        << " episode=" << i << "\n";
    eval::EpisodeSpec spec;
    spec.config = env_cfg;
    spec.seed = train::derive_seed(seed, static_cast<uint64_t>(i));
    spec.max_steps = static_cast<int>(cfg.timeout * env::kControlHz + 0.5);
    auto controller = make();
    const eval::EpisodeTrace t = eval::run_episode(*controller, spec, &out);
    if (!out) throw ConfigError(std::string("write failed for ") + name);
    char line[160];
    std::snprintf(line, sizeof(line), "%s: %d steps, return %.3f, %s", name, t.steps, t.episode_return,
                  t.fell ? "fell" : "survived");
    return std::string(line);
  });
  for (const auto& s : summaries) std::printf("%s\n", s.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-phase adaptation training and evaluation on a planar biped"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--workers", common.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* train_cmd = app.add_subcommand("train", "Run one training phase");
  std::string phase;
  std::string out_dir;
  std::optional<std::string> from;
  bool resume = false;
  train_cmd->add_option("--phase", phase, "1, 2, 3 or robust")->required()->check(CLI::IsMember({"1", "2", "3", "robust"}));
  train_cmd->add_option("--out", out_dir, "Output directory for checkpoints and run records")->required();
  train_cmd->add_option("--from", from, "Directory holding input checkpoints (default: --out)");
  train_cmd->add_flag("--resume", resume, "Continue from the checkpoint in --out");
  add_common(train_cmd, common);

  auto* eval_cmd = app.add_subcommand("eval", "Compare controllers and write bench.csv");
  std::string modes = "priv,rma,arma,static,robust";
  std::string ckpt_dir;
  std::string csv = "bench.csv";
  bool thorough = false;
  eval_cmd->add_option("--modes", modes, "Comma-separated subset of priv,rma,arma,static,robust");
  eval_cmd->add_option("--ckpt-dir", ckpt_dir, "Directory with phase1/2/3 and robust checkpoints")->required();
  eval_cmd->add_option("--csv", csv, "Output CSV path");
  eval_cmd->add_flag("--thorough", thorough, "Three trials per tracking cell");
  add_common(eval_cmd, common);

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every network");

  auto* roll_cmd = app.add_subcommand("rollout", "Dump per-episode trajectory CSVs");
  std::string mode = "arma";
  int episodes = 1;
  std::string dump_dir;
  roll_cmd->add_option("--mode", mode, "Controller mode");
  roll_cmd->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
  roll_cmd->add_option("--ckpt-dir", ckpt_dir, "Checkpoint directory")->required();
  roll_cmd->add_option("--dump-dir", dump_dir, "Directory for trajectory CSVs")->required();
  add_common(roll_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) {
      return run_train(common, phase, out_dir, from ? std::optional<fs::path>(*from) : std::nullopt, resume);
    }
    if (*eval_cmd) return run_eval(common, modes, ckpt_dir, csv, thorough);
    if (*grad_cmd) return run_gradcheck();
    if (*roll_cmd) return run_rollout(common, mode, episodes, ckpt_dir, dump_dir);
  } catch (const arma::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
