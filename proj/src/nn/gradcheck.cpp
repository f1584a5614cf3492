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

#include "arma/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace arma::nn {

namespace {

BasicTensor<double> random_tensor(std::vector<int> shape, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  BasicTensor<double> t(std::move(shape));
  for (auto& v : t.values()) v = normal(rng);
  return t;
}

double evaluate(const std::function<BasicVar<double>(BasicTape<double>&)>& loss) {
  BasicTape<double> tape;
  return loss(tape).value()[0];
}

}  // namespace

double grad_check(const std::vector<BasicParameter<double>*>& params,
                  const std::function<BasicVar<double>(BasicTape<double>&)>& loss, uint64_t seed,
                  const GradCheckOptions& options) {
  for (auto* p : params) p->zero_grad();
  {
    BasicTape<double> tape;
    tape.backward(loss(tape));
  }

  std::vector<std::pair<size_t, size_t>> index;
  for (size_t k = 0; k < params.size(); ++k) {
    for (size_t i = 0; i < params[k]->value.size(); ++i) index.emplace_back(k, i);
  }
  if (index.size() > options.max_samples) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(index.begin(), index.end(), rng);
    index.resize(options.max_samples);
  }

  double worst = 0.0;
  for (const auto& [k, i] : index) {
    double& w = params[k]->value[i];
    const double saved = w;
    w = saved + options.step;
    const double up = evaluate(loss);
    w = saved - options.step;
    const double down = evaluate(loss);
    w = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double analytic = params[k]->grad[i];
    const double err =
        std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    worst = std::max(worst, err);
  }
  return worst;
}

double grad_check(const MlpSpec& spec, uint64_t seed, const GradCheckOptions& options) {
  std::mt19937_64 rng(seed);
  BasicMlp<double> net(spec, "net");
  net.init(rng);
  // Lift the output layer so the check is not dominated by a tiny final gain.
  for (auto& p : net.params()) {
    for (auto& v : p.value.values()) v += 0.05 * std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  const auto input = random_tensor({options.batch, spec.input_dim}, rng);
  const auto proj = random_tensor({options.batch, spec.output_dim}, rng);
  auto loss = [&](BasicTape<double>& tape) {
    auto y = net.forward(tape, tape.constant(input));
    return sum(y * tape.constant(proj));
  };
  return grad_check(net.parameters(), loss, seed, options);
}

double grad_check(const Conv1dSpec& conv, const std::vector<int>& head_hidden, int output_dim,
                  uint64_t seed, const GradCheckOptions& options) {
  std::mt19937_64 rng(seed);
  BasicConvEncoder<double> net(conv, head_hidden, output_dim, "net");
  net.init(rng);
  for (auto* p : net.parameters()) {
    for (auto& v : p->value.values()) v += 0.05 * std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  const auto input = random_tensor({options.batch, conv.length, conv.in_channels}, rng);
  const auto proj = random_tensor({options.batch, output_dim}, rng);
  auto loss = [&](BasicTape<double>& tape) {
    auto y = net.forward(tape, tape.constant(input));
    return sum(y * tape.constant(proj));
  };
  return grad_check(net.parameters(), loss, seed, options);
}

}  // namespace arma::nn
