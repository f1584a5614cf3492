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

#ifndef ARMA_IO_CHECKPOINT_HPP_
#define ARMA_IO_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "arma/agents/agent_set.hpp"
#include "arma/nn/adam.hpp"

namespace arma::io {

// Binary layout, all integers little-endian:
//   "ARMA" | u32 version | u8 endian marker (1 = little)
//   u32 metadata bytes | metadata (UTF-8 JSON)
//   u32 tensor count | per tensor: u32 name bytes, name, u32 rank, u32 dims[rank], f32 payload
//   u64 FNV-1a of everything above
inline constexpr uint32_t kCheckpointVersion = 1;

enum class PhaseTag { kPhase1, kPhase2, kPhase3, kRobust };

const char* phase_tag_name(PhaseTag tag);
PhaseTag parse_phase_tag(std::string_view s);

struct NamedTensor {
  std::string name;
  nn::Tensor value;
};

struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<NamedTensor> tensors;

  const nn::Tensor* find(std::string_view name) const;
  PhaseTag phase() const;
};

std::string serialize(const Checkpoint& ckpt);
Checkpoint deserialize(std::string_view bytes);

// Writes through a temporary file and rename.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Loads and checks the phase tag.
Checkpoint load_checkpoint(const std::filesystem::path& path, PhaseTag expected);

nlohmann::json agent_config_json(const agents::AgentConfig& cfg);
agents::AgentConfig agent_config_from_json(const nlohmann::json& j);

// Tensors of the selected modules plus architecture metadata.
Checkpoint make_checkpoint(const agents::AgentSet& agents, unsigned modules, PhaseTag tag,
                           nlohmann::json extra = nlohmann::json::object());
// Copies the selected modules into `agents`; architecture or tensor mismatch
// raises CheckpointError.
void restore(agents::AgentSet& agents, const Checkpoint& ckpt, unsigned modules);
// AgentSet rebuilt from the architecture stored in the checkpoint.
agents::AgentSet agents_from_checkpoint(const Checkpoint& ckpt, unsigned modules);

void add_optimizer_state(Checkpoint& ckpt, const std::string& prefix, const nn::AdamState& state);
nn::AdamState optimizer_state(const Checkpoint& ckpt, const std::string& prefix);

}  // namespace arma::io

#endif  // ARMA_IO_CHECKPOINT_HPP_
