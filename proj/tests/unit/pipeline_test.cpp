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

// Regression checks on the desk pipeline outputs (tools/run_pipeline.sh).
// Skipped when the artifacts have not been produced.

#include <gtest/gtest.h>

#include <filesystem>

#include "arma/io/checkpoint.hpp"
#include "arma/train/phases.hpp"

namespace {

namespace fs = std::filesystem;
using namespace arma;

const fs::path kDir = ARMA_ARTIFACTS_DIR;

#define REQUIRE_ARTIFACT(name) \
  if (!fs::exists(kDir / (name))) GTEST_SKIP() << "no " << (kDir / (name)) << "; run tools/run_pipeline.sh"

TEST(DeskPipelineTest, PhaseOneReturnGrows) {
  REQUIRE_ARTIFACT("phase1.csv");
  const auto records = train::read_run_record(kDir / "phase1.csv");
  ASSERT_GT(records.size(), 500u);
  ASSERT_EQ(records[10].iter, 10);
  ASSERT_EQ(records[500].iter, 500);
  EXPECT_GT(records[500].return_mean, 2.0 * records[10].return_mean);
}

TEST(DeskPipelineTest, AdaptationHalvesLatentError) {
  REQUIRE_ARTIFACT("phase2.ckpt");
  const io::Checkpoint p2 = io::load_checkpoint(kDir / "phase2.ckpt", io::PhaseTag::kPhase2);
  const double initial = p2.metadata.at("initial_mse").get<double>();
  const double final_mse = p2.metadata.at("final_mse").get<double>();
  EXPECT_GT(final_mse, 0.0);
  EXPECT_LT(final_mse, 0.5 * initial);
}

}  // namespace
