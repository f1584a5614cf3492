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

#include "arma/agents/gradcheck_suite.hpp"

#include "arma/nn/gradcheck.hpp"

namespace arma::agents {

std::vector<GradCheckEntry> gradcheck_suite(const AgentConfig& config, const std::vector<uint64_t>& seeds) {
  config.validate();
  std::vector<GradCheckEntry> out;
  for (uint64_t s : seeds) {
    out.push_back({"policy", s, nn::grad_check(config.policy_spec(), s)});
    out.push_back({"encoder", s, nn::grad_check(config.mu_spec(), s)});
    out.push_back({"adaptation", s, nn::grad_check(config.phi_spec(), config.phi_hidden, config.latent_dim, s)});
  }
  return out;
}

}  // namespace arma::agents
