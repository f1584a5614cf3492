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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "arma/errors.hpp"
#include "arma/io/config.hpp"

namespace arma::io {
namespace {

namespace fs = std::filesystem;
using Strings = std::vector<std::string>;

TEST(ConfigTest, EmptyFileGivesDefaults) {
  const RunConfig c = parse_config_text("");
  EXPECT_EQ(c.profile, Profile::kDesk);
  EXPECT_FALSE(c.seed.has_value());
  EXPECT_EQ(c.train.ppo.batch, 4096);
  EXPECT_EQ(c.train.ppo.minibatch, 512);
  EXPECT_EQ(c.train.agents.policy_hidden, (std::vector<int>{128, 128}));
  EXPECT_EQ(c.hash(), RunConfig{}.hash());
}

TEST(ConfigTest, PaperScaleProfile) {
  const RunConfig c = parse_config_text("profile = \"paper-scale\"\n");
  EXPECT_EQ(c.train.ppo.batch, 65536);
  EXPECT_EQ(c.train.ppo.minibatch, 8192);
  EXPECT_EQ(c.train.agents.policy_hidden, (std::vector<int>{512, 512}));
  EXPECT_EQ(c.train.agents.critic_hidden, (std::vector<int>{512, 512}));
  EXPECT_NE(c.hash(), RunConfig{}.hash());
  // Explicit keys refine the profile regardless of their position.
  const RunConfig d = parse_config_text("[ppo]\nepochs = 3\n[agents]\npolicy_hidden = [256, 256]\n", Strings{"profile=paper-scale"});
  EXPECT_EQ(d.train.ppo.batch, 65536);
  EXPECT_EQ(d.train.ppo.epochs, 3);
  EXPECT_EQ(d.train.agents.policy_hidden, (std::vector<int>{256, 256}));
}

TEST(ConfigTest, OutOfRangeValues) {
  try {
    parse_config_text("[ppo]\ngamma = 1.5\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("ppo.gamma"), std::string::npos);
    EXPECT_EQ(e.exit_code(), 2);
  }
  EXPECT_THROW(parse_config_text("[env]\nfriction_min = 0.01\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[env]\nfriction_min = 2.0\nfriction_max = 1.0\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[ppo]\nminibatch = 500\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[ppo]\nbatch = lots\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[reward]\nweights = [1, 2]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[agents]\nphi_conv = [8:4]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("profile = \"huge\"\n"), ConfigError);
}

TEST(ConfigTest, UnknownKeysRejected) {
  EXPECT_THROW(parse_config_text("[ppo]\ngama = 0.9\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[physics]\ndt = 0.001\n"), ConfigError);
  EXPECT_THROW(parse_config_text("", Strings{"ppo.nope=1"}), ConfigError);
}

TEST(ConfigTest, OverridesWin) {
  const RunConfig c = parse_config_text("[ppo]\nlr = 0.001\n", Strings{"ppo.lr=0.002", "env.terrain_mix=1,0,0,0"});
  EXPECT_EQ(c.train.ppo.lr, 0.002);
  EXPECT_EQ(c.train.env.terrain_mix, (std::array<double, 4>{1, 0, 0, 0}));
}

TEST(ConfigTest, HashTracksEveryKeyButSeed) {
  const uint64_t base = RunConfig{}.hash();
  EXPECT_EQ(parse_config_text("seed = 99\n").hash(), base);
  EXPECT_EQ(*parse_config_text("seed = 99\n").seed, 99u);
  EXPECT_NE(parse_config_text("[eval]\nepisodes = 11\n").hash(), base);
  EXPECT_NE(parse_config_text("[reward]\nrhos = [5, 0.1, 5, 5, 1, 5e-7, 1.3e-5]\n").hash(), base);
  EXPECT_EQ(parse_config_text("[ppo]\ngamma = 0.99\n").hash(), base);
}

TEST(ConfigTest, CanonicalTextParsesBack) {
  const RunConfig c = parse_config_text("[agents]\nphi_conv = [6:3:16, 4:1:16]\nmu_hidden = [64]\n[env]\nresample_params = false\n");
  EXPECT_EQ(c.train.agents.phi_conv.size(), 2u);
  EXPECT_EQ(c.train.agents.phi_conv[0].kernel, 6);
  EXPECT_FALSE(c.train.env.resample_params);
  std::vector<std::string> lines;
  std::string text = c.canonical();
  for (size_t p = 0; (p = text.find('\n')) != std::string::npos; text.erase(0, p + 1)) lines.push_back(text.substr(0, p));
  EXPECT_EQ(parse_config_text("", lines).hash(), c.hash());
}

TEST(ConfigTest, SeedResolution) {
  RunConfig c;
  ::unsetenv("ARMA_SEED");
  EXPECT_EQ(resolve_seed(std::nullopt, c), 1u);
  ::setenv("ARMA_SEED", "42", 1);
  EXPECT_EQ(resolve_seed(std::nullopt, c), 42u);
  c.seed = 7;
  EXPECT_EQ(resolve_seed(std::nullopt, c), 7u);
  EXPECT_EQ(resolve_seed(3, c), 3u);
  c.seed.reset();
  ::setenv("ARMA_SEED", "x", 1);
  EXPECT_THROW(resolve_seed(std::nullopt, c), ConfigError);
  ::unsetenv("ARMA_SEED");
}

TEST(ConfigTest, FileAndSubConfigs) {
  const fs::path p = fs::temp_directory_path() / "arma_config_test.toml";
  std::ofstream(p) << "# desk run\nseed = 5\n[train]\nphase1_iterations = 10\n";
  const RunConfig c = parse_config(p);
  const train::TrainConfig t = c.train_config(resolve_seed(std::nullopt, c));
  EXPECT_EQ(t.seed, 5u);
  EXPECT_EQ(t.phase1_iterations, 10);
  EXPECT_EQ(t.config_hash, c.hash());
  EXPECT_EQ(c.eval_config(5).env.max_steps, c.train.env.max_steps);
  fs::remove(p);
  EXPECT_THROW(parse_config(p), ConfigError);
}

TEST(ConfigTest, FrictionRangeRemapsDraws) {
  env::EnvConfig e;
  e.friction_range = {0.5, 1.0};
  e.resample_params = true;
  for (uint64_t s = 0; s < 50; ++s) {
    env::BipedEnv env(e, s);
    env.reset();
    EXPECT_GE(env.params().friction_ratio, 0.5);
    EXPECT_LE(env.params().friction_ratio, 1.0);
  }
}

}  // namespace
}  // namespace arma::io
