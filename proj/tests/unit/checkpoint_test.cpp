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

#include <filesystem>
#include <fstream>
#include <random>

#include "arma/errors.hpp"
#include "arma/io/checkpoint.hpp"

namespace arma::io {
namespace {

namespace fs = std::filesystem;

agents::AgentConfig random_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(1, 24);
  std::bernoulli_distribution coin(0.5);
  agents::AgentConfig c;
  c.use_latent = coin(rng);
  c.policy_hidden = {width(rng), width(rng)};
  c.critic_hidden = {width(rng)};
  c.mu_hidden = {width(rng)};
  c.phi_hidden = {width(rng)};
  c.init_log_std = -1.0 - 0.1 * width(rng);
  return c;
}

TEST(CheckpointTest, RandomizedRoundTrip) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    agents::AgentSet a(random_config(rng));
    a.init(rng());
    const unsigned modules = a.config().use_latent ? agents::kAllModules : (agents::kPolicy | agents::kCritic);
    const Checkpoint c = make_checkpoint(a, modules, PhaseTag::kPhase3, {{"iteration", trial}});
    const Checkpoint back = deserialize(serialize(c));
    EXPECT_EQ(back.metadata, c.metadata);
    const agents::AgentSet b = agents_from_checkpoint(back, modules);
    ASSERT_EQ(b.hash(modules), a.hash(modules)) << "trial " << trial;
    EXPECT_EQ(agent_config_json(b.config()), agent_config_json(a.config()));
  }
}

TEST(CheckpointTest, FileRoundTripAndPhaseCheck) {
  const fs::path p = fs::temp_directory_path() / "arma_checkpoint_test.ckpt";
  agents::AgentSet a;
  a.init(3);
  save_checkpoint(p, make_checkpoint(a, agents::kPolicy | agents::kEncoder, PhaseTag::kPhase1));
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  EXPECT_EQ(load_checkpoint(p, PhaseTag::kPhase1).phase(), PhaseTag::kPhase1);
  EXPECT_THROW(load_checkpoint(p, PhaseTag::kPhase2), CheckpointError);
  fs::remove(p);
  EXPECT_THROW(load_checkpoint(p), CheckpointError);
}

TEST(CheckpointTest, PhaseTagNames) {
  for (PhaseTag t : {PhaseTag::kPhase1, PhaseTag::kPhase2, PhaseTag::kPhase3, PhaseTag::kRobust}) {
    EXPECT_EQ(parse_phase_tag(phase_tag_name(t)), t);
  }
  EXPECT_THROW(parse_phase_tag("4"), CheckpointError);
  Checkpoint c;
  EXPECT_THROW(c.phase(), CheckpointError);
}

class CorruptionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    agents::AgentSet a;
    a.init(5);
    bytes = serialize(make_checkpoint(a, agents::kPolicy, PhaseTag::kPhase1));
  }
  std::string bytes;
};

TEST_F(CorruptionTest, FlippedPayloadByteFailsChecksum) {
  std::string b = bytes;
  b[b.size() / 2] ^= 0x10;
  EXPECT_THROW(deserialize(b), CheckpointError);
}

TEST_F(CorruptionTest, EveryTruncationIsRejected) {
  for (size_t n = 0; n < bytes.size(); n += 97) EXPECT_THROW(deserialize(bytes.substr(0, n)), CheckpointError) << n;
  EXPECT_THROW(deserialize(bytes.substr(0, bytes.size() - 1)), CheckpointError);
}

TEST_F(CorruptionTest, BadHeaderFields) {
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize(magic), CheckpointError);
  std::string version = bytes;
  version[4] = 2;
  EXPECT_THROW(deserialize(version), CheckpointError);
  std::string endian = bytes;
  endian[8] = 2;
  EXPECT_THROW(deserialize(endian), CheckpointError);
  EXPECT_THROW(deserialize(bytes + "x"), CheckpointError);
}

TEST(CheckpointTest, ArchitectureMismatchIsRejected) {
  agents::AgentSet a;
  a.init(1);
  const Checkpoint c = make_checkpoint(a, agents::kPolicy, PhaseTag::kPhase1);
  agents::AgentConfig other;
  other.policy_hidden = {64, 64};
  agents::AgentSet b(other);
  EXPECT_THROW(restore(b, c, agents::kPolicy), CheckpointError);
  agents::AgentSet same;
  EXPECT_THROW(restore(same, c, agents::kCritic), CheckpointError);
}

TEST(CheckpointTest, OptimizerStateRoundTrip) {
  agents::AgentSet a;
  a.init(2);
  std::vector<nn::Parameter*> ps = a.parameters(agents::kPolicy);
  nn::Adam adam(ps, nn::AdamConfig{});
  std::mt19937_64 rng(1);
  std::normal_distribution<float> n(0.0f, 1.0f);
  for (int s = 0; s < 3; ++s) {
    for (nn::Parameter* p : ps) {
      for (float& g : p->grad.values()) g = n(rng);
    }
    adam.step();
  }
  Checkpoint c = make_checkpoint(a, agents::kPolicy, PhaseTag::kPhase1);
  add_optimizer_state(c, "adam", adam.state());
  const nn::AdamState back = optimizer_state(deserialize(serialize(c)), "adam");
  EXPECT_EQ(back.step_count, 3);
  ASSERT_EQ(back.slots.size(), adam.state().slots.size());
  for (size_t i = 0; i < back.slots.size(); ++i) {
    EXPECT_EQ(back.slots[i].name, adam.state().slots[i].name);
    EXPECT_EQ(back.slots[i].first_moment, adam.state().slots[i].first_moment);
    EXPECT_EQ(back.slots[i].second_moment, adam.state().slots[i].second_moment);
  }
  EXPECT_THROW(optimizer_state(c, "missing"), CheckpointError);
}

}  // namespace
}  // namespace arma::io
