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

#include "arma/nn/layers.hpp"

#include <Eigen/QR>

#include <cmath>

namespace arma::nn {

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) {
    throw DimensionError("mlp: input and output dims must be >= 1");
  }
  for (int h : hidden) {
    if (h < 1) throw DimensionError("mlp: hidden widths must be >= 1");
  }
}

size_t MlpSpec::parameter_count() const {
  size_t n = 0;
  int prev = input_dim;
  for (int h : hidden) {
    n += static_cast<size_t>(prev) * h + h;
    prev = h;
  }
  n += static_cast<size_t>(prev) * output_dim + output_dim;
  return n;
}

void Conv1dSpec::validate() const {
  if (in_channels < 1) throw DimensionError("conv1d: in_channels must be >= 1");
  if (layers.empty()) throw DimensionError("conv1d: at least one layer required");
  int len = length;
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.kernel < 1 || l.stride < 1 || l.channels < 1) {
      throw DimensionError("conv1d layer " + std::to_string(i) + ": kernel, stride, channels must be >= 1");
    }
    len = conv_output_length(len, l.kernel, l.stride);
    if (len < 1) {
      throw DimensionError("history window too small: length " + std::to_string(length) +
                           " does not admit conv layer " + std::to_string(i));
    }
  }
}

std::vector<int> Conv1dSpec::output_lengths() const {
  std::vector<int> out;
  int len = length;
  for (const auto& l : layers) {
    len = conv_output_length(len, l.kernel, l.stride);
    out.push_back(len);
  }
  return out;
}

int Conv1dSpec::flat_dim() const {
  const auto lens = output_lengths();
  return lens.empty() ? 0 : lens.back() * layers.back().channels;
}

size_t Conv1dSpec::parameter_count() const {
  size_t n = 0;
  int ch = in_channels;
  for (const auto& l : layers) {
    n += static_cast<size_t>(l.kernel) * ch * l.channels + l.channels;
    ch = l.channels;
  }
  return n;
}

template <typename T>
BasicParameter<T>& BasicParamSet<T>::add(std::string name, BasicTensor<T> value) {
  if (find(name) != nullptr) throw ContractError("duplicate parameter name '" + name + "'");
  params_.emplace_back(std::move(name), std::move(value));
  return params_.back();
}

template <typename T>
BasicParameter<T>* BasicParamSet<T>::find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
const BasicParameter<T>* BasicParamSet<T>::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
BasicParameter<T>& BasicParamSet<T>::at(const std::string& name) {
  BasicParameter<T>* p = find(name);
  if (p == nullptr) throw ContractError("unknown parameter '" + name + "'");
  return *p;
}

template <typename T>
const BasicParameter<T>& BasicParamSet<T>::at(const std::string& name) const {
  const BasicParameter<T>* p = find(name);
  if (p == nullptr) throw ContractError("unknown parameter '" + name + "'");
  return *p;
}

template <typename T>
size_t BasicParamSet<T>::total_count() const {
  size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
void BasicParamSet<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template <typename T>
std::vector<BasicParameter<T>*> BasicParamSet<T>::pointers() {
  std::vector<BasicParameter<T>*> out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
std::vector<const BasicParameter<T>*> BasicParamSet<T>::pointers() const {
  std::vector<const BasicParameter<T>*> out;
  for (const auto& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
BasicTensor<T> orthogonal_init(int fan_in, int fan_out, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int big = std::max(fan_in, fan_out);
  const int small = std::min(fan_in, fan_out);
  Eigen::MatrixXd g(big, small);
  for (int i = 0; i < big; ++i) {
    for (int j = 0; j < small; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int j = 0; j < small; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  BasicTensor<T> out({fan_in, fan_out});
  for (int i = 0; i < fan_in; ++i) {
    for (int j = 0; j < fan_out; ++j) {
      const double v = fan_in >= fan_out ? q(i, j) : q(j, i);
      out[static_cast<size_t>(i) * fan_out + j] = static_cast<T>(gain * v);
    }
  }
  return out;
}

template <typename T>
BasicMlp<T>::BasicMlp(MlpSpec spec, std::string name) : spec_(std::move(spec)), name_(std::move(name)) {
  spec_.validate();
  int prev = spec_.input_dim;
  std::vector<int> widths = spec_.hidden;
  widths.push_back(spec_.output_dim);
  for (size_t i = 0; i < widths.size(); ++i) {
    const std::string base = name_ + ".l" + std::to_string(i);
    params_.add(base + ".w", BasicTensor<T>({prev, widths[i]}));
    params_.add(base + ".b", BasicTensor<T>({1, widths[i]}));
    prev = widths[i];
  }
}

template <typename T>
void BasicMlp<T>::init(std::mt19937_64& rng) {
  const size_t layers = params_.size() / 2;
  for (size_t i = 0; i < layers; ++i) {
    auto& w = params_[2 * i];
    const double gain = (i + 1 == layers) ? spec_.output_gain : std::sqrt(2.0);
    w.value = orthogonal_init<T>(w.value.dim(0), w.value.dim(1), gain, rng);
    params_[2 * i + 1].value.fill(T(0));
  }
}

template <typename T>
void BasicMlp<T>::check_input(int cols) const {
  if (cols != spec_.input_dim) {
    throw DimensionError(name_ + " layer 0: expected input dim " + std::to_string(spec_.input_dim) +
                         ", got " + std::to_string(cols));
  }
}

template <typename T>
BasicVar<T> BasicMlp<T>::forward(BasicTape<T>& tape, BasicVar<T> x) {
  check_input(x.value().cols());
  const size_t layers = params_.size() / 2;
  BasicVar<T> h = x;
  for (size_t i = 0; i < layers; ++i) {
    h = linear(h, tape.parameter(params_[2 * i]), tape.parameter(params_[2 * i + 1]));
    if (i + 1 < layers) h = spec_.activation == Activation::kTanh ? tanh(h) : relu(h);
  }
  return h;
}

template <typename T>
BasicTensor<T> BasicMlp<T>::infer(const BasicTensor<T>& x) const {
  check_input(x.cols());
  const size_t layers = params_.size() / 2;
  RowMatrix<T> h = x.matrix();
  for (size_t i = 0; i < layers; ++i) {
    const auto& w = params_[2 * i].value;
    const auto& b = params_[2 * i + 1].value;
    RowMatrix<T> next(h.rows(), w.cols());
    next.noalias() = h * w.matrix();
    next.rowwise() += ConstRowVectorMap<T>(b.data(), w.cols());
    if (i + 1 < layers) {
      if (spec_.activation == Activation::kTanh) {
        next = next.array().tanh();
      } else {
        next = next.array().max(T(0));
      }
    }
    h = std::move(next);
  }
  std::vector<int> shape = x.shape();
  shape.back() = spec_.output_dim;
  return BasicTensor<T>(shape, std::vector<T>(h.data(), h.data() + h.size()));
}

template <typename T>
BasicConvEncoder<T>::BasicConvEncoder(Conv1dSpec conv, std::vector<int> head_hidden, int output_dim,
                                      std::string name)
    : conv_(std::move(conv)), name_(std::move(name)) {
  conv_.validate();
  int ch = conv_.in_channels;
  for (size_t i = 0; i < conv_.layers.size(); ++i) {
    const auto& l = conv_.layers[i];
    const std::string base = name_ + ".c" + std::to_string(i);
    conv_params_.add(base + ".w", BasicTensor<T>({l.kernel * ch, l.channels}));
    conv_params_.add(base + ".b", BasicTensor<T>({1, l.channels}));
    ch = l.channels;
  }
  MlpSpec head;
  head.input_dim = conv_.flat_dim();
  head.hidden = std::move(head_hidden);
  head.output_dim = output_dim;
  head.activation = Activation::kTanh;
  head_ = BasicMlp<T>(head, name_ + ".head");
}

template <typename T>
void BasicConvEncoder<T>::init(std::mt19937_64& rng) {
  for (size_t i = 0; i < conv_params_.size() / 2; ++i) {
    auto& w = conv_params_[2 * i];
    w.value = orthogonal_init<T>(w.value.dim(0), w.value.dim(1), std::sqrt(2.0), rng);
    conv_params_[2 * i + 1].value.fill(T(0));
  }
  head_.init(rng);
}

template <typename T>
void BasicConvEncoder<T>::check_input(const BasicTensor<T>& x) const {
  if (x.rank() != 3 || x.dim(2) != conv_.in_channels) {
    throw DimensionError(name_ + " conv layer 0: expected (batch, length, " +
                         std::to_string(conv_.in_channels) + "), got " + shape_string(x.shape()));
  }
  if (x.dim(1) != conv_.length) {
    if (x.dim(1) < conv_.length) {
      throw DimensionError("history window too small: " + name_ + " expects length " +
                           std::to_string(conv_.length) + ", got " + std::to_string(x.dim(1)));
    }
    throw DimensionError(name_ + ": expected sequence length " + std::to_string(conv_.length) +
                         ", got " + std::to_string(x.dim(1)));
  }
}

template <typename T>
BasicVar<T> BasicConvEncoder<T>::forward(BasicTape<T>& tape, BasicVar<T> x) {
  check_input(x.value());
  const int batch = x.value().dim(0);
  BasicVar<T> h = x;
  for (size_t i = 0; i < conv_.layers.size(); ++i) {
    const auto& l = conv_.layers[i];
    h = relu(conv1d(h, tape.parameter(conv_params_[2 * i]), tape.parameter(conv_params_[2 * i + 1]),
                    l.kernel, l.stride));
  }
  h = reshape(h, {batch, conv_.flat_dim()});
  return head_.forward(tape, h);
}

template <typename T>
BasicTensor<T> BasicConvEncoder<T>::infer(const BasicTensor<T>& x) const {
  check_input(x);
  const int batch = x.dim(0);
  using Strided = Eigen::Map<const RowMatrix<T>, 0, Eigen::OuterStride<>>;
  std::vector<T> cur(x.values().begin(), x.values().end());
  int len = x.dim(1);
  int ch = x.dim(2);
  for (size_t i = 0; i < conv_.layers.size(); ++i) {
    const auto& l = conv_.layers[i];
    const auto& w = conv_params_[2 * i].value;
    const auto& b = conv_params_[2 * i + 1].value;
    const int out_len = conv_output_length(len, l.kernel, l.stride);
    std::vector<T> next(static_cast<size_t>(batch) * out_len * l.channels);
    for (int n = 0; n < batch; ++n) {
      Strided win(cur.data() + static_cast<size_t>(n) * len * ch, out_len, l.kernel * ch,
                  Eigen::OuterStride<>(l.stride * ch));
      MatrixMap<T> y(next.data() + static_cast<size_t>(n) * out_len * l.channels, out_len, l.channels);
      y.noalias() = win * w.matrix();
      y.rowwise() += ConstRowVectorMap<T>(b.data(), l.channels);
      y = y.array().max(T(0));
    }
    cur = std::move(next);
    len = out_len;
    ch = l.channels;
  }
  return head_.infer(BasicTensor<T>({batch, len * ch}, std::move(cur)));
}

template <typename T>
std::vector<BasicParameter<T>*> BasicConvEncoder<T>::parameters() {
  auto out = conv_params_.pointers();
  for (auto* p : head_.parameters()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<const BasicParameter<T>*> BasicConvEncoder<T>::parameters() const {
  auto out = conv_params_.pointers();
  for (const auto* p : head_.parameters()) out.push_back(p);
  return out;
}

template class BasicParamSet<float>;
template class BasicParamSet<double>;
template class BasicMlp<float>;
template class BasicMlp<double>;
template class BasicConvEncoder<float>;
template class BasicConvEncoder<double>;
template BasicTensor<float> orthogonal_init<float>(int, int, double, std::mt19937_64&);
template BasicTensor<double> orthogonal_init<double>(int, int, double, std::mt19937_64&);

}  // namespace arma::nn
