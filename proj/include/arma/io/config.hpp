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

#ifndef ARMA_IO_CONFIG_HPP_
#define ARMA_IO_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arma/eval/eval.hpp"
#include "arma/train/phases.hpp"

namespace arma::io {

enum class Profile { kDesk, kPaperScale };

// Every tunable of the pipeline. Files are TOML-style:
//
//   profile = "desk"
//   seed = 7
//   [ppo]
//   gamma = 0.99
//   [agents]
//   policy_hidden = [128, 128]
struct RunConfig {
  Profile profile = Profile::kDesk;
  std::optional<uint64_t> seed;
  train::TrainConfig train;
  eval::EvalConfig eval;

  // key = value lines for every key except seed, in a fixed order.
  std::string canonical() const;
  // FNV-1a of canonical().
  uint64_t hash() const;
  void validate() const;

  // Copies of the sub-configs with seed, hash and shared env settings filled in.
  train::TrainConfig train_config(uint64_t seed) const;
  eval::EvalConfig eval_config(uint64_t seed) const;
};

// Sets the batch, minibatch and hidden widths of the selected profile.
void apply_profile(RunConfig& cfg, Profile profile);

// Overrides are "section.key=value" strings and win over the file. Unknown
// keys and out-of-range values raise ConfigError.
RunConfig parse_config_text(std::string_view text, std::span<const std::string> overrides = {});
RunConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

// Explicit seed, else the config's, else $ARMA_SEED, else 1.
uint64_t resolve_seed(std::optional<uint64_t> explicit_seed, const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace arma::io

#endif  // ARMA_IO_CONFIG_HPP_
