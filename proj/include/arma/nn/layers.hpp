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

#ifndef ARMA_NN_LAYERS_HPP_
#define ARMA_NN_LAYERS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arma/nn/tape.hpp"

namespace arma::nn {

enum class Activation { kTanh, kRelu };

struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;
  Activation activation = Activation::kTanh;
  // Scale of the orthogonal init on the final layer.
  double output_gain = 1.0;

  void validate() const;
  size_t parameter_count() const;
};

struct ConvLayerSpec {
  int kernel = 1;
  int stride = 1;
  int channels = 1;
};

// Temporal convolution stack over a (length x in_channels) sequence. Layers
// are valid convolutions followed by relu.
struct Conv1dSpec {
  int in_channels = 0;
  int length = 0;
  std::vector<ConvLayerSpec> layers;

  void validate() const;
  // Sequence length after each layer, floor((L - k) / s) + 1.
  std::vector<int> output_lengths() const;
  // Flattened size of the last feature map.
  int flat_dim() const;
  size_t parameter_count() const;
};

// Ordered, name-addressable parameter collection.
template <typename T>
class BasicParamSet {
 public:
  BasicParameter<T>& add(std::string name, BasicTensor<T> value);
  BasicParameter<T>* find(const std::string& name);
  const BasicParameter<T>* find(const std::string& name) const;
  BasicParameter<T>& at(const std::string& name);
  const BasicParameter<T>& at(const std::string& name) const;

  size_t size() const { return params_.size(); }
  BasicParameter<T>& operator[](size_t i) { return params_[i]; }
  const BasicParameter<T>& operator[](size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  size_t total_count() const;
  void zero_grad();
  std::vector<BasicParameter<T>*> pointers();
  std::vector<const BasicParameter<T>*> pointers() const;

 private:
  std::vector<BasicParameter<T>> params_;
};

// Orthogonal init scaled by `gain`, shape (fan_in, fan_out).
template <typename T>
BasicTensor<T> orthogonal_init(int fan_in, int fan_out, double gain, std::mt19937_64& rng);

template <typename T>
class BasicMlp {
 public:
  BasicMlp() = default;
  // Parameters are zero until init() is called.
  BasicMlp(MlpSpec spec, std::string name);

  void init(std::mt19937_64& rng);
  BasicVar<T> forward(BasicTape<T>& tape, BasicVar<T> x);
  // Tape-free evaluation; same arithmetic as forward().
  BasicTensor<T> infer(const BasicTensor<T>& x) const;

  const MlpSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }
  BasicParamSet<T>& params() { return params_; }
  const BasicParamSet<T>& params() const { return params_; }
  std::vector<BasicParameter<T>*> parameters() { return params_.pointers(); }
  std::vector<const BasicParameter<T>*> parameters() const { return params_.pointers(); }

 private:
  void check_input(int cols) const;

  MlpSpec spec_;
  std::string name_;
  BasicParamSet<T> params_;
};

// Adaptation-module shape: conv stack, flatten, then a dense head.
template <typename T>
class BasicConvEncoder {
 public:
  BasicConvEncoder() = default;
  BasicConvEncoder(Conv1dSpec conv, std::vector<int> head_hidden, int output_dim, std::string name);

  void init(std::mt19937_64& rng);
  // x: (batch, length, in_channels) -> (batch, output_dim).
  BasicVar<T> forward(BasicTape<T>& tape, BasicVar<T> x);
  BasicTensor<T> infer(const BasicTensor<T>& x) const;

  const Conv1dSpec& conv_spec() const { return conv_; }
  const MlpSpec& head_spec() const { return head_.spec(); }
  const std::string& name() const { return name_; }
  BasicParamSet<T>& conv_params() { return conv_params_; }
  BasicMlp<T>& head() { return head_; }
  const BasicMlp<T>& head() const { return head_; }

  // Conv parameters followed by head parameters.
  std::vector<BasicParameter<T>*> parameters();
  std::vector<const BasicParameter<T>*> parameters() const;

 private:
  void check_input(const BasicTensor<T>& x) const;

  Conv1dSpec conv_;
  std::string name_;
  BasicParamSet<T> conv_params_;
  BasicMlp<T> head_;
};

using ParamSet = BasicParamSet<float>;
using Mlp = BasicMlp<float>;
using ConvEncoder = BasicConvEncoder<float>;

}  // namespace arma::nn

#endif  // ARMA_NN_LAYERS_HPP_
