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
#include <random>

#include "arma/nn/adam.hpp"
#include "arma/nn/gaussian.hpp"
#include "arma/nn/gradcheck.hpp"
#include "arma/nn/layers.hpp"

namespace arma::nn {
namespace {

MlpSpec make_spec(int in, std::vector<int> hidden, int out, Activation act = Activation::kTanh) {
  MlpSpec s;
  s.input_dim = in;
  s.hidden = std::move(hidden);
  s.output_dim = out;
  s.activation = act;
  return s;
}

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<float>(n(rng));
  return t;
}

TEST(MlpTest, ZeroWeightsOutputBias) {
  Mlp net(make_spec(5, {7}, 3), "m");
  auto& b = net.params().at("m.l1.b");
  b.value = Tensor({1, 3}, {0.5f, -1.0f, 2.0f});
  std::mt19937_64 rng(1);
  const Tensor out = net.infer(random_tensor({4, 5}, rng));
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ(out[r * 3 + 0], 0.5f);
    EXPECT_EQ(out[r * 3 + 1], -1.0f);
    EXPECT_EQ(out[r * 3 + 2], 2.0f);
  }
}

TEST(MlpTest, ParameterCountPaperSizes) {
  EXPECT_EQ(make_spec(4, {512, 512}, 10).parameter_count(), 270346u);
  Mlp net(make_spec(4, {512, 512}, 10), "pi");
  EXPECT_EQ(net.params().total_count(), 270346u);
}

TEST(MlpTest, SingleUnitIsTanhOfBias) {
  Mlp net(make_spec(1, {1}, 1), "m");
  net.params().at("m.l0.w").value[0] = 1.0f;
  net.params().at("m.l0.b").value[0] = 0.3f;
  net.params().at("m.l1.w").value[0] = 1.0f;
  const Tensor out = net.infer(Tensor({1, 1}, {0.0f}));
  EXPECT_FLOAT_EQ(out[0], std::tanh(0.3f));
}

TEST(MlpTest, InputDimMismatchNamesLayer) {
  Mlp net(make_spec(4, {8}, 2), "policy");
  try {
    net.infer(Tensor({1, 5}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("policy layer 0"), std::string::npos);
  }
}

TEST(MlpTest, ForwardIsPureAndMatchesInfer) {
  std::mt19937_64 rng(3);
  Mlp net(make_spec(6, {16, 16}, 3), "m");
  net.init(rng);
  const Tensor x = random_tensor({5, 6}, rng);
  Tape t1, t2;
  const Tensor a = net.forward(t1, t1.constant(x)).value();
  const Tensor b = net.forward(t2, t2.constant(x)).value();
  EXPECT_EQ(a, b);
  const Tensor c = net.infer(x);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-5);
}

Conv1dSpec adaptation_conv() {
  Conv1dSpec c;
  c.in_channels = 22;
  c.length = 70;
  c.layers = {{8, 4, 32}, {5, 1, 32}, {5, 1, 32}};
  return c;
}

TEST(ConvTest, AdaptationLengths) {
  EXPECT_EQ(adaptation_conv().output_lengths(), (std::vector<int>{16, 12, 8}));
  EXPECT_EQ(adaptation_conv().flat_dim(), 256);
}

TEST(ConvTest, ZeroKernelGivesBias) {
  Tape tape;
  std::mt19937_64 rng(4);
  auto x = tape.constant(random_tensor({2, 10, 3}, rng));
  auto w = tape.constant(Tensor({4 * 3, 2}));
  auto b = tape.constant(Tensor({1, 2}, {0.25f, -0.75f}));
  const Tensor y = conv1d(x, w, b, 4, 2).value();
  ASSERT_EQ(y.shape(), (std::vector<int>{2, 4, 2}));
  for (size_t i = 0; i < y.size(); i += 2) {
    EXPECT_EQ(y[i], 0.25f);
    EXPECT_EQ(y[i + 1], -0.75f);
  }
}

TEST(ConvTest, TooShortSequenceIsRejected) {
  Tape tape;
  auto x = tape.constant(Tensor({1, 7, 2}));
  auto w = tape.constant(Tensor({8 * 2, 1}));
  auto b = tape.constant(Tensor({1, 1}));
  try {
    conv1d(x, w, b, 8, 1);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("history window too small"), std::string::npos);
  }
  Conv1dSpec c = adaptation_conv();
  c.length = 7;
  EXPECT_THROW(c.validate(), DimensionError);
}

// Composed output lengths from the kernel/stride arithmetic agree with the
// shapes the conv op actually produces.
TEST(ConvTest, LengthFormulaSweep) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> kd(1, 8), sd(1, 4);
  for (int length = 8; length <= 128; ++length) {
    Conv1dSpec c;
    c.in_channels = 2;
    c.length = length;
    c.layers = {{kd(rng), sd(rng), 3}, {kd(rng), sd(rng), 2}};
    int expect = length;
    bool ok = true;
    for (const auto& l : c.layers) {
      expect = expect < l.kernel ? 0 : (expect - l.kernel) / l.stride + 1;
      ok = ok && expect >= 1;
    }
    if (!ok) {
      EXPECT_THROW(c.validate(), DimensionError);
      continue;
    }
    Tape tape;
    auto h = tape.constant(Tensor({1, length, 2}));
    int ch = 2;
    for (const auto& l : c.layers) {
      h = conv1d(h, tape.constant(Tensor({l.kernel * ch, l.channels})),
                 tape.constant(Tensor({1, l.channels})), l.kernel, l.stride);
      ch = l.channels;
    }
    EXPECT_EQ(h.value().dim(1), expect) << "length " << length;
    EXPECT_EQ(c.output_lengths().back(), expect);
  }
}

TEST(BackwardTest, SumOfParamsGivesOnes) {
  Parameter p("p", Tensor({3, 4}, 0.5f));
  Tape tape;
  tape.backward(sum(tape.parameter(p)));
  for (float g : p.grad.values()) EXPECT_EQ(g, 1.0f);
}

TEST(BackwardTest, DetachedConstantHasNoGradient) {
  Parameter p("p", Tensor({1, 3}, 2.0f));
  Tape tape;
  auto v = tape.parameter(p);
  auto d = detach(v);
  tape.backward(sum(v * d));
  // d/dp of p * stopgrad(p) is stopgrad(p) = 2.
  for (float g : p.grad.values()) EXPECT_EQ(g, 2.0f);
  EXPECT_TRUE(tape.grad(d.id()).empty());
}

TEST(BackwardTest, NonScalarLossRejected) {
  Parameter p("p", Tensor({2, 2}, 1.0f));
  Tape tape;
  EXPECT_THROW(tape.backward(tape.parameter(p)), ContractError);
}

// Independent oracle: a hand-written double forward pass of the same
// two-layer tanh network, differentiated by central differences.
double oracle_loss(const std::vector<double>& w0, const std::vector<double>& b0,
                   const std::vector<double>& w1, const std::vector<double>& b1,
                   const std::vector<double>& x, const std::vector<double>& proj, int batch, int in,
                   int hid, int out) {
  double loss = 0.0;
  for (int n = 0; n < batch; ++n) {
    std::vector<double> h(hid);
    for (int j = 0; j < hid; ++j) {
      double a = b0[j];
      for (int i = 0; i < in; ++i) a += x[n * in + i] * w0[i * hid + j];
      h[j] = std::tanh(a);
    }
    for (int k = 0; k < out; ++k) {
      double y = b1[k];
      for (int j = 0; j < hid; ++j) y += h[j] * w1[j * out + k];
      loss += y * proj[n * out + k];
    }
  }
  return loss;
}

TEST(BackwardTest, MatchesFiniteDifferenceOracle) {
  const int batch = 3, in = 5, hid = 7, out = 2;
  std::mt19937_64 rng(11);
  Mlp net(make_spec(in, {hid}, out), "m");
  net.init(rng);
  for (auto& p : net.params()) {
    for (auto& v : p.value.values()) v += static_cast<float>(0.1 * std::normal_distribution<>(0, 1)(rng));
  }
  const Tensor x = random_tensor({batch, in}, rng);
  const Tensor proj = random_tensor({batch, out}, rng);
  net.params().zero_grad();
  Tape tape;
  tape.backward(sum(net.forward(tape, tape.constant(x)) * tape.constant(proj)));

  auto as_double = [](const Tensor& t) { return std::vector<double>(t.values().begin(), t.values().end()); };
  std::vector<std::vector<double>> p;
  for (auto& q : net.params()) p.push_back(as_double(q.value));
  const auto xd = as_double(x);
  const auto pd = as_double(proj);
  const double h = 1e-4;
  double worst = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    for (size_t i = 0; i < p[k].size(); ++i) {
      const double saved = p[k][i];
      p[k][i] = saved + h;
      const double up = oracle_loss(p[0], p[1], p[2], p[3], xd, pd, batch, in, hid, out);
      p[k][i] = saved - h;
      const double down = oracle_loss(p[0], p[1], p[2], p[3], xd, pd, batch, in, hid, out);
      p[k][i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = net.params()[k].grad[i];
      worst = std::max(worst, std::abs(analytic - numeric) /
                                  std::max(1e-8, std::abs(analytic) + std::abs(numeric)));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(BackwardTest, BroadcastRowGradientReduces) {
  Parameter row("row", Tensor({1, 3}, 1.0f));
  Tape tape;
  auto x = tape.constant(Tensor({4, 3}, 2.0f));
  tape.backward(sum(x * tape.parameter(row)));
  for (float g : row.grad.values()) EXPECT_EQ(g, 8.0f);
}

TEST(AdamTest, ZeroGradientLeavesParams) {
  Parameter p("p", Tensor({2, 2}, {1, 2, 3, 4}));
  Adam opt({&p}, {});
  p.zero_grad();
  opt.step();
  EXPECT_EQ(p.value, Tensor({2, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(opt.step_count(), 1);
}

TEST(AdamTest, FirstStepIsLearningRate) {
  Parameter p("p", Tensor({1}, {0.0f}));
  AdamConfig cfg;
  cfg.lr = 1e-3;
  Adam opt({&p}, cfg);
  p.grad = Tensor({1}, {1.0f});
  opt.step();
  EXPECT_NEAR(p.value[0], -1e-3 / (1.0 + 1e-8), 1e-9);
}

TEST(AdamTest, NonFiniteGradientNamesParameter) {
  Parameter p("enc.l0.w", Tensor({1}, {0.0f}));
  Adam opt({&p}, {});
  p.grad = Tensor({1}, {std::nanf("")});
  try {
    opt.step();
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("enc.l0.w"), std::string::npos);
  }
}

TEST(AdamTest, IdenticalRunsBitwiseEqual) {
  auto run = [] {
    std::mt19937_64 rng(9);
    Mlp net(make_spec(4, {8}, 2), "m");
    net.init(rng);
    Adam opt(net.parameters(), {});
    const Tensor x = random_tensor({6, 4}, rng);
    for (int i = 0; i < 20; ++i) {
      opt.zero_grad();
      Tape tape;
      tape.backward(mean(square(net.forward(tape, tape.constant(x)))));
      opt.step();
    }
    return net.params()[0].value;
  };
  EXPECT_EQ(run(), run());
}

TEST(GaussianTest, LogProbAtMean) {
  const std::vector<float> mean{0.1f, -0.2f, 0.3f};
  const std::vector<float> log_std{-1.0f, -0.5f, 0.2f};
  double expect = 0.0;
  for (float ls : log_std) expect += -ls - 0.5 * std::log(2 * M_PI);
  EXPECT_NEAR(gaussian_log_prob(mean, log_std, mean), expect, 1e-12);
  Tape tape;
  auto m = tape.constant(Tensor({1, 3}, mean));
  auto lp = gaussian_log_prob(m, tape.constant(Tensor({1, 3}, log_std)), m);
  EXPECT_NEAR(lp.value()[0], expect, 1e-5);
}

TEST(GradCheckTest, SmallTanhMlp) {
  EXPECT_LT(grad_check(make_spec(3, {8}, 2), 1), 1e-3);
}

TEST(GradCheckTest, ToyConv) {
  Conv1dSpec c;
  c.in_channels = 2;
  c.length = 12;
  c.layers = {{5, 1, 3}};
  EXPECT_LT(grad_check(c, {4}, 2, 1), 1e-3);
}

TEST(GradCheckTest, LinearNetIsExact) {
  EXPECT_LT(grad_check(make_spec(4, {}, 3), 1), 1e-6);
}

TEST(GradCheckTest, RepoArchitecturesAtThreeSeeds) {
  for (uint64_t seed : {1, 2, 3}) {
    EXPECT_LT(grad_check(make_spec(162, {32, 32}, 6), seed), 1e-3);
    EXPECT_LT(grad_check(make_spec(14, {64}, 8), seed), 1e-3);
    EXPECT_LT(grad_check(adaptation_conv(), {64}, 8, seed), 1e-3);
  }
}

}  // namespace
}  // namespace arma::nn
