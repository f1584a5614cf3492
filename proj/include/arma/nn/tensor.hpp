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

#ifndef ARMA_NN_TENSOR_HPP_
#define ARMA_NN_TENSOR_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "arma/errors.hpp"

namespace arma::nn {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using ConstRowVectorMap = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <typename T>
using RowVectorMap = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;

std::string shape_string(const std::vector<int>& shape);

// Dense row-major tensor. Every op in the library views a tensor as a matrix
// of rows() x cols(), where cols() is the last dimension.
template <typename T>
class BasicTensor {
 public:
  // Aligned so that Eigen reductions peel the same way on every run.
  using Storage = std::vector<T, Eigen::aligned_allocator<T>>;

  BasicTensor() = default;
  explicit BasicTensor(std::vector<int> shape, T fill = T(0))
      : shape_(std::move(shape)), data_(count(shape_), fill) {}
  BasicTensor(std::vector<int> shape, const std::vector<T>& data)
      : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    check_count();
  }
  BasicTensor(std::vector<int> shape, std::initializer_list<T> data)
      : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    check_count();
  }
  BasicTensor(std::vector<int> shape, Storage data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_count();
  }
  static BasicTensor scalar(T v) { return BasicTensor({1}, Storage{v}); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  int cols() const { return shape_.empty() ? 0 : shape_.back(); }
  int rows() const {
    const int c = cols();
    return c == 0 ? 0 : static_cast<int>(data_.size()) / c;
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  Storage& storage() { return data_; }
  const Storage& storage() const { return data_; }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  MatrixMap<T> matrix() { return MatrixMap<T>(data_.data(), rows(), cols()); }
  ConstMatrixMap<T> matrix() const {
    return ConstMatrixMap<T>(data_.data(), rows(), cols());
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // Same storage, new shape with identical element count.
  BasicTensor reshaped(std::vector<int> shape) const {
    if (count(shape) != data_.size()) {
      throw DimensionError("cannot reshape " + shape_string(shape_) + " to " +
                           shape_string(shape));
    }
    return BasicTensor(std::move(shape), data_);
  }

  bool all_finite() const {
    for (T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  template <typename U>
  BasicTensor<U> cast() const {
    typename BasicTensor<U>::Storage out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

  static size_t count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
      if (d < 0) throw DimensionError("negative dimension in " + shape_string(shape));
      n *= static_cast<size_t>(d);
    }
    return n;
  }

 private:
  void check_count() const {
    if (data_.size() != count(shape_)) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + shape_string(shape_));
    }
  }

  std::vector<int> shape_;
  Storage data_;
};

using Tensor = BasicTensor<float>;

}  // namespace arma::nn

#endif  // ARMA_NN_TENSOR_HPP_
