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

#ifndef ARMA_AGENTS_GRADCHECK_SUITE_HPP_
#define ARMA_AGENTS_GRADCHECK_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "arma/agents/agent_set.hpp"

namespace arma::agents {

struct GradCheckEntry {
  std::string network;
  uint64_t seed = 0;
  double max_rel_error = 0.0;
};

// Finite-difference check of the policy, encoder and adaptation networks of
// `config` at each seed.
std::vector<GradCheckEntry> gradcheck_suite(const AgentConfig& config, const std::vector<uint64_t>& seeds = {1, 2, 3});

}  // namespace arma::agents

#endif  // ARMA_AGENTS_GRADCHECK_SUITE_HPP_
