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

#ifndef ARMA_NN_TAPE_HPP_
#define ARMA_NN_TAPE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "arma/nn/tensor.hpp"

namespace arma::nn {

template <typename T>
struct BasicParameter {
  std::string name;
  BasicTensor<T> value;
  BasicTensor<T> grad;

  BasicParameter() = default;
  BasicParameter(std::string n, BasicTensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() {
    if (grad.shape() != value.shape()) grad = BasicTensor<T>(value.shape());
    grad.fill(T(0));
  }
};

template <typename T>
class BasicTape;

// Handle to a node recorded on a tape. Cheap to copy; only valid while the
// tape is alive and not cleared.
template <typename T>
class BasicVar {
 public:
  BasicVar() = default;
  BasicVar(BasicTape<T>* tape, int id) : tape_(tape), id_(id) {}

  int id() const { return id_; }
  BasicTape<T>* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr && id_ >= 0; }

  const BasicTensor<T>& value() const;
  const BasicTensor<T>& grad() const;
  const std::vector<int>& shape() const { return value().shape(); }

 private:
  BasicTape<T>* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so a reverse
// sweep visits every node after all of its consumers.
template <typename T>
class BasicTape {
 public:
  using Var = BasicVar<T>;
  using TensorT = BasicTensor<T>;
  using BackwardFn = std::function<void(BasicTape&, int)>;

  Var constant(TensorT value) { return record(std::move(value), false, nullptr); }
  Var variable(TensorT value) { return record(std::move(value), true, nullptr); }
  Var parameter(BasicParameter<T>& p) {
    Var v = record(p.value, true, nullptr);
    nodes_[static_cast<size_t>(v.id())].param = &p;
    return v;
  }

  Var record(TensorT value, bool requires_grad, BackwardFn fn) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.backward = std::move(fn);
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size()) - 1);
  }

  // Seeds d(loss)/d(loss) = 1 and propagates. Parameter gradients are added
  // to BasicParameter::grad; callers zero them between steps.
  void backward(Var loss);

  const TensorT& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  bool requires_grad(int id) const {
    return nodes_[static_cast<size_t>(id)].requires_grad;
  }
  // Gradient buffer for node `id`, allocated on first use.
  TensorT& grad_ref(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.size() != n.value.size()) n.grad = TensorT(n.value.shape());
    return n.grad;
  }
  const TensorT& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }

  size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    TensorT value;
    TensorT grad;
    BackwardFn backward;
    bool requires_grad = false;
    BasicParameter<T>* param = nullptr;
  };
  std::vector<Node> nodes_;
};

template <typename T>
const BasicTensor<T>& BasicVar<T>::value() const {
  return tape_->value(id_);
}
template <typename T>
const BasicTensor<T>& BasicVar<T>::grad() const {
  return tape_->grad(id_);
}

// Elementwise binary ops broadcast a (1 x n) row or a single element against
// an (m x n) operand.
template <typename T> BasicVar<T> add(BasicVar<T> a, BasicVar<T> b);
template <typename T> BasicVar<T> sub(BasicVar<T> a, BasicVar<T> b);
template <typename T> BasicVar<T> mul(BasicVar<T> a, BasicVar<T> b);
template <typename T> BasicVar<T> minimum(BasicVar<T> a, BasicVar<T> b);

template <typename T> BasicVar<T> scale(BasicVar<T> a, T s);
template <typename T> BasicVar<T> add_scalar(BasicVar<T> a, T s);
template <typename T> BasicVar<T> exp(BasicVar<T> a);
template <typename T> BasicVar<T> log(BasicVar<T> a);
template <typename T> BasicVar<T> tanh(BasicVar<T> a);
template <typename T> BasicVar<T> relu(BasicVar<T> a);
template <typename T> BasicVar<T> square(BasicVar<T> a);
// Gradient passes only where lo < a < hi.
template <typename T> BasicVar<T> clamp(BasicVar<T> a, T lo, T hi);

// Reductions. sum/mean return a single-element tensor of shape {1};
// sum_last reduces the last dimension to 1.
template <typename T> BasicVar<T> sum(BasicVar<T> a);
template <typename T> BasicVar<T> mean(BasicVar<T> a);
template <typename T> BasicVar<T> sum_last(BasicVar<T> a);

// y = x W + b, with W of shape (in, out) and b of shape (1, out).
template <typename T> BasicVar<T> linear(BasicVar<T> x, BasicVar<T> w, BasicVar<T> b);
// x: (batch, length, in_ch), w: (kernel*in_ch, out_ch), b: (1, out_ch).
// Output (batch, floor((length - kernel)/stride) + 1, out_ch).
template <typename T>
BasicVar<T> conv1d(BasicVar<T> x, BasicVar<T> w, BasicVar<T> b, int kernel, int stride);
template <typename T> BasicVar<T> concat_last(BasicVar<T> a, BasicVar<T> b);
template <typename T> BasicVar<T> reshape(BasicVar<T> a, std::vector<int> shape);
// Copy of the value with no gradient path.
template <typename T> BasicVar<T> detach(BasicVar<T> a);

template <typename T> BasicVar<T> operator+(BasicVar<T> a, BasicVar<T> b) { return add(a, b); }
template <typename T> BasicVar<T> operator-(BasicVar<T> a, BasicVar<T> b) { return sub(a, b); }
template <typename T> BasicVar<T> operator*(BasicVar<T> a, BasicVar<T> b) { return mul(a, b); }
template <typename T> BasicVar<T> operator-(BasicVar<T> a) { return scale(a, T(-1)); }
template <typename T> BasicVar<T> operator*(BasicVar<T> a, T s) { return scale(a, s); }
template <typename T> BasicVar<T> operator*(T s, BasicVar<T> a) { return scale(a, s); }
template <typename T> BasicVar<T> operator+(BasicVar<T> a, T s) { return add_scalar(a, s); }
template <typename T> BasicVar<T> operator-(BasicVar<T> a, T s) { return add_scalar(a, -s); }

// Output length of one valid (unpadded) convolution layer.
inline int conv_output_length(int length, int kernel, int stride) {
  return length < kernel ? 0 : (length - kernel) / stride + 1;
}

using Tape = BasicTape<float>;
using Var = BasicVar<float>;
using Parameter = BasicParameter<float>;

}  // namespace arma::nn

#endif  // ARMA_NN_TAPE_HPP_
