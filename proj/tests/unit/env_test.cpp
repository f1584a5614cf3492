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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "arma/env/biped_env.hpp"
#include "arma/errors.hpp"

namespace arma::env {
namespace {

EnvConfig still_config(Command c = {0.0, 0.98}) {
  EnvConfig cfg;
  cfg.fixed_command = c;
  cfg.fixed_params = EnvParams{};
  cfg.fixed_terrain = TerrainKind::kFlat;
  return cfg;
}

TEST(EnvParamsTest, SamplesStayInRanges) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const EnvParams p = sample_env_params([&] { return u(rng); });
    ASSERT_TRUE(p.within_ranges());
    for (double v : p.flattened()) ASSERT_LE(std::abs(v), 1.0 + 1e-12);
  }
}

TEST(EnvParamsTest, MidpointDraw) {
  const EnvParams p = sample_env_params([] { return 0.5; });
  for (double m : p.link_mass_scale) EXPECT_DOUBLE_EQ(m, 1.0);
  EXPECT_DOUBLE_EQ(p.joint_damping_scale, 2.15);
  EXPECT_DOUBLE_EQ(p.friction_ratio, 1.65);
  EXPECT_DOUBLE_EQ(p.terrain_amplitude, 0.06);
  for (double v : p.flattened()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(EnvParamsTest, TableRanges) {
  EXPECT_EQ(EnvParams::kFrictionRange.lo, 0.3);
  EXPECT_EQ(EnvParams::kFrictionRange.hi, 3.0);
  EXPECT_EQ(EnvParams::kTerrainRange.lo, 0.0);
  EXPECT_EQ(EnvParams::kTerrainRange.hi, 0.12);
  EXPECT_EQ(EnvParams::kDampingRange.hi, 4.0);
  EXPECT_EQ(static_cast<int>(EnvParams{}.flattened().size()), 14);
}

TEST(TerrainTest, FlatIsZero) {
  const Terrain t = Terrain::flat();
  for (double x : {-50.0, -1.3, 0.0, 0.77, 42.0}) EXPECT_EQ(t.height(x), 0.0);
}

TEST(TerrainTest, SlopeHeight) {
  const Terrain t = Terrain::slope(0.1);
  EXPECT_NEAR(t.height(1.0), 0.1, 1e-12);
  EXPECT_NEAR(t.slope_at(3.0), 0.1, 1e-12);
}

TEST(TerrainTest, FractalPeakToPeak) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const Terrain t = Terrain::fractal(0.12, rng);
    const auto [lo, hi] = std::minmax_element(t.profile().begin(), t.profile().end());
    EXPECT_LE(*hi - *lo, 0.12 + 1e-12);
    EXPECT_GT(*hi - *lo, 0.06);
  }
}

TEST(TerrainTest, OutOfExtentIsClamped) {
  std::mt19937_64 rng(3);
  const Terrain t = Terrain::fractal(0.1, rng);
  bool clamped = false;
  const double edge = t.height(Terrain::kExtent, &clamped);
  EXPECT_FALSE(clamped);
  EXPECT_EQ(t.height(Terrain::kExtent + 10.0, &clamped), edge);
  EXPECT_TRUE(clamped);
}

TEST(PdTorqueTest, Cases) {
  const RobotModel m = RobotModel::nominal();
  RobotState s;
  s.q[3 + 2] = 0.3;
  JointVector target{};
  target[2] = 0.3;
  EXPECT_EQ(pd_torque(target, s, m)[2], 0.0);
  target[2] = 0.4;  // ankle, Kp = 50
  EXPECT_NEAR(pd_torque(target, s, m)[2], 5.0, 1e-12);
  target[2] = 0.3 + 8.0;  // raw 400
  EXPECT_EQ(pd_torque(target, s, m)[2], 150.0);
  target[2] = 0.3 - 8.0;
  EXPECT_EQ(pd_torque(target, s, m)[2], -150.0);
}

TEST(LowPassTest, Cases) {
  const JointVector a{1, 2, 3, 4, 5, 6};
  const JointVector prev{6, 5, 4, 3, 2, 1};
  EXPECT_EQ(low_pass(a, prev, 0.0), a);
  EXPECT_EQ(low_pass(a, prev, 1.0), prev);
  JointVector y{};
  const JointVector ones{1, 1, 1, 1, 1, 1};
  for (int i = 0; i < 3; ++i) y = low_pass(ones, y, 0.8);
  EXPECT_NEAR(y[0], 1.0 - 0.8 * 0.8 * 0.8, 1e-12);
  EXPECT_NEAR(y[0], 0.488, 1e-12);
}

RobotState airborne_state() {
  RobotState s;
  s.q[1] = 5.0;
  s.q[3] = 0.2;
  s.q[4] = -0.4;
  s.q[6] = -0.1;
  s.q[7] = -0.3;
  return s;
}

TEST(PhysicsTest, ZeroGravityEquilibrium) {
  RobotModel m = RobotModel::nominal();
  m.gravity = 0.0;
  const RobotState s = airborne_state();
  const RobotState n = physics_step(s, {}, m, Terrain::flat(), 1.0);
  EXPECT_EQ(n.q, s.q);
  EXPECT_EQ(n.qd, s.qd);
}

TEST(PhysicsTest, FreeFall) {
  const RobotModel m = RobotModel::nominal();
  RobotState s = airborne_state();
  const double z0 = s.q[1];
  const int n = static_cast<int>(std::lround(0.1 / kPhysicsDt));
  for (int i = 0; i < n; ++i) s = physics_step(s, {}, m, Terrain::flat(), 1.0);
  const double oracle = 0.5 * 9.81 * 0.1 * 0.1;
  EXPECT_NEAR(z0 - s.q[1], oracle, 0.02 * oracle);
}

TEST(PhysicsTest, StaticGroundReaction) {
  BipedEnv env(still_config(), 1);
  RobotState s = env.state();
  const JointVector hold = env.filtered_action();
  for (int i = 0; i < 1200; ++i) {
    s = physics_step(s, pd_torque(hold, s, env.model()), env.model(), env.terrain(), 1.0);
  }
  const double weight = env.model().total_mass() * env.model().gravity;
  EXPECT_NEAR(s.grf[0].z + s.grf[1].z, weight, 0.05 * weight);
}

TEST(PhysicsTest, EnergyNonIncreasingInFlight) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  RobotModel m = RobotModel::nominal();
  for (int trial = 0; trial < 5; ++trial) {
    RobotState s = airborne_state();
    s.q[1] = 50.0;
    for (double& v : s.qd) v = n(rng);
    const double e0 = kinetic_energy(m, s) + potential_energy(m, s);
    const int steps = static_cast<int>(std::lround(1.0 / kPhysicsDt));
    for (int i = 0; i < steps; ++i) s = physics_step(s, {}, m, Terrain::flat(), 1.0);
    const double e1 = kinetic_energy(m, s) + potential_energy(m, s);
    EXPECT_LE(e1, e0 + 0.01 * std::abs(e0));
  }
}

TEST(PhysicsTest, DivergenceIsReported) {
  RobotState s = airborne_state();
  s.qd[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(physics_step(s, {}, RobotModel::nominal(), Terrain::flat(), 1.0), DivergenceError);
}

TEST(PhysicsTest, FrictionCone) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.4);
  for (double ratio : {0.3, 1.0, 3.0}) {
    EnvParams p;
    p.friction_ratio = ratio;
    EnvConfig cfg = still_config({0.8, 0.9});
    cfg.fixed_params = p;
    BipedEnv env(cfg, 4);
    const double mu = env.model().friction(p);
    RobotState s = env.state();
    for (int i = 0; i < 1500; ++i) {
      JointVector target = env.filtered_action();
      if (i % 20 == 0) {
        for (double& t : target) t += noise(rng);
      }
      s = physics_step(s, pd_torque(target, s, env.model()), env.model(), env.terrain(), mu);
      for (const Vec2& f : s.grf) {
        ASSERT_GE(f.z, 0.0);
        ASSERT_LE(std::abs(f.x), mu * f.z + 1e-9);
      }
    }
  }
}

TEST(BipedEnvTest, DeterministicTrajectories) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.3);
  std::vector<JointVector> actions(300);
  for (auto& a : actions) {
    for (double& v : a) v = n(rng);
  }
  EnvConfig cfg;
  BipedEnv a(cfg, 77), b(cfg, 77);
  for (const JointVector& act : actions) {
    const StepResult ra = a.step(act);
    const StepResult rb = b.step(act);
    ASSERT_EQ(a.state().q, b.state().q);
    ASSERT_EQ(a.state().qd, b.state().qd);
    ASSERT_EQ(ra.reward, rb.reward);
    if (ra.done) {
      a.reset();
      b.reset();
    }
  }
}

TEST(BipedEnvTest, LowPelvisEndsEpisode) {
  BipedEnv env(still_config(), 1);
  RobotState s = env.state();
  s.q[1] = 0.50;
  s.qd = {};
  // Legs folded so the feet clear the ground.
  for (int leg = 0; leg < 2; ++leg) {
    s.q[3 + 3 * leg] = 1.5;
    s.q[4 + 3 * leg] = -2.5;
    s.q[5 + 3 * leg] = 0.0;
  }
  env.set_state(s);
  const JointVector folded{1.5, -2.5, 0.0, 1.5, -2.5, 0.0};
  env.set_filtered_action(folded);
  const StepResult r = env.step(folded);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.fell);
  EXPECT_FALSE(r.timeout);
  EXPECT_LT(env.state().q[1], 0.55);
}

TEST(BipedEnvTest, TimeoutEndsEpisode) {
  EnvConfig cfg = still_config();
  cfg.max_steps = 3;
  BipedEnv env(cfg, 1);
  StepResult r;
  for (int i = 0; i < 3; ++i) {
    EXPECT_FALSE(r.done);
    r = env.step(env.filtered_action());
  }
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.timeout);
  EXPECT_DOUBLE_EQ(env.time(), 3.0 / 30.0);
}

TEST(BipedEnvTest, HealthyStepRewardBounds) {
  BipedEnv env(still_config(), 1);
  const StepResult r = env.step(env.filtered_action());
  EXPECT_FALSE(r.done);
  EXPECT_GT(r.reward, 0.0);
  EXPECT_LE(r.reward, 1.0);
}

TEST(BipedEnvTest, RewardStaysInUnitInterval) {
  EnvConfig cfg;
  BipedEnv env(cfg, 21);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int i = 0; i < 3000; ++i) {
    env.set_imitation_multiplier(1.0 - 0.7 * (i % 100) / 100.0);
    JointVector a;
    for (double& v : a) v = n(rng);
    const StepResult r = env.step(a);
    if (!r.diverged) {
      ASSERT_GT(r.reward, 0.0);
      ASSERT_LE(r.reward, 1.0);
    }
    if (r.done) env.reset();
  }
}

TEST(BipedEnvTest, ResetPutsFeetOnGround) {
  EnvConfig cfg;
  BipedEnv env(cfg, 8);
  for (int i = 0; i < 20; ++i) {
    env.reset();
    const Kinematics k = compute_kinematics(env.model(), env.state().q, env.state().qd);
    double gap = 1e9;
    for (const auto& c : k.contact) gap = std::min(gap, c.pos.z - env.terrain().height(c.pos.x));
    EXPECT_NEAR(gap, 1e-3, 1e-9);
    EXPECT_TRUE(env.command().valid());
    EXPECT_TRUE(env.params().within_ranges());
  }
}

TEST(RewardTest, PerfectImitationIsOne) {
  const gait::ReferenceFrame ref = gait::reference(Command{0.4, 0.9}, 0.3);
  RewardInput in;
  in.q_m = ref.q_m;
  in.pelvis = ref.q_p;
  in.pelvis_vel = ref.dq_p;
  const RewardBreakdown r = reward(in, ref, RewardConfig{});
  EXPECT_NEAR(r.total, 1.0, 1e-12);
}

TEST(RewardTest, MotorTerm) {
  gait::ReferenceFrame ref;
  RewardInput in;
  in.q_m[0] = std::sqrt(0.2);
  const RewardBreakdown r = reward(in, ref, RewardConfig{});
  EXPECT_NEAR(r.terms[0], 0.11036, 5e-6);
  EXPECT_NEAR(r.terms[0], 0.3 * std::exp(-1.0), 1e-12);
}

TEST(RewardTest, PitchTerm) {
  gait::ReferenceFrame ref;
  RewardInput in;
  in.pitch = std::numbers::pi / 2;
  const RewardBreakdown r = reward(in, ref, RewardConfig{});
  EXPECT_NEAR(r.terms[3], 8.76e-4, 5e-7);
}

TEST(RewardTest, MultiplierScalesImitationOnly) {
  RewardConfig cfg;
  cfg.imitation_multiplier = 0.5;
  const RewardBreakdown r = reward(RewardInput{}, gait::ReferenceFrame{}, cfg);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.terms[i], 0.5 * cfg.weights[i], 1e-12);
  for (int i = 5; i < 7; ++i) EXPECT_NEAR(r.terms[i], cfg.weights[i], 1e-12);
}

TEST(RewardTest, ConfigValidation) {
  RewardConfig cfg;
  cfg.weights[0] = 0.4;
  EXPECT_THROW(cfg.validate(), ConfigError);
  RewardConfig ok;
  EXPECT_NO_THROW(ok.validate());
}

TEST(RewardTest, ImitationSchedule) {
  EXPECT_DOUBLE_EQ(imitation_multiplier(0, 1000), 1.0);
  EXPECT_NEAR(imitation_multiplier(250, 1000), 0.65, 1e-12);
  EXPECT_NEAR(imitation_multiplier(500, 1000), 0.3, 1e-12);
  EXPECT_NEAR(imitation_multiplier(999, 1000), 0.3, 1e-12);
}

TEST(SchedulerTest, ResamplesAtBoundary) {
  EpisodeScheduler sched(8.0);
  std::mt19937_64 rng(1);
  const auto before = sched.tick(238.0 / 30.0, 239.0 / 30.0, rng);
  EXPECT_NEAR(239.0 / 30.0, 7.97, 0.01);
  EXPECT_FALSE(before.command);
  EXPECT_FALSE(before.params);
  const auto at = sched.tick(239.0 / 30.0, 240.0 / 30.0, rng);
  ASSERT_TRUE(at.command);
  ASSERT_TRUE(at.params);
  EXPECT_FALSE(sched.tick(240.0 / 30.0, 241.0 / 30.0, rng).command);
  for (int i = 0; i < 1000; ++i) {
    const auto r = sched.tick(7.99, 8.01, rng);
    ASSERT_TRUE(Command::kHeightRange.contains(r.command->height));
    ASSERT_TRUE(r.params->within_ranges());
  }
}

TEST(SchedulerTest, EnvResamplesEveryEightSeconds) {
  EnvConfig cfg = still_config();
  cfg.fixed_command.reset();
  cfg.max_steps = 100000;
  BipedEnv env(cfg, 3);
  RobotState hold = env.state();
  for (int i = 1; i <= 480; ++i) {
    env.set_state(hold);
    const StepResult r = env.step(env.filtered_action());
    ASSERT_EQ(r.resampled, i == 240 || i == 480) << i;
  }
}

TEST(TrajectoryTest, HeaderAndColumns) {
  std::ostringstream out;
  TrajectoryWriter w(out);
  BipedEnv env(still_config(), 1);
  w.write(env, env.step(env.filtered_action()));
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("t,qx,qz,pitch,j1", 0), 0u);
  EXPECT_NE(header.find("grf_L,grf_R,r,term1"), std::string::npos);
  const auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  EXPECT_EQ(cols(header), 33);
  EXPECT_EQ(cols(row), 33);
}

}  // namespace
}  // namespace arma::env
