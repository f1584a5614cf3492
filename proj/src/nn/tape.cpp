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

#include "arma/nn/tape.hpp"

#include <algorithm>
#include <cmath>

namespace arma::nn {

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
void BasicTape<T>::backward(Var loss) {
  if (loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
  const int root = loss.id();
  if (value(root).size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " +
                        shape_string(value(root).shape()));
  }
  if (!requires_grad(root)) return;
  grad_ref(root)[0] = T(1);
  for (int i = root; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (!n.requires_grad || n.grad.size() != n.value.size()) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) {
      BasicParameter<T>& p = *n.param;
      if (p.grad.size() != p.value.size()) p.zero_grad();
      for (size_t k = 0; k < p.grad.size(); ++k) p.grad[k] += n.grad[k];
    }
  }
}

namespace {

enum class Mode { kFull, kRow, kScalar };

struct Plan {
  std::vector<int> shape;
  int rows = 0;
  int cols = 0;
  Mode a = Mode::kFull;
  Mode b = Mode::kFull;
};

inline size_t at(Mode m, int r, int c, int cols) {
  switch (m) {
    case Mode::kFull:
      return static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c);
    case Mode::kRow:
      return static_cast<size_t>(c);
    case Mode::kScalar:
      return 0;
  }
  return 0;
}

template <typename T>
Plan plan(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* op) {
  Plan p;
  const BasicTensor<T>& big = a.size() >= b.size() ? a : b;
  p.shape = big.shape();
  p.rows = big.rows();
  p.cols = big.cols();
  auto mode = [&](const BasicTensor<T>& x) {
    if (x.size() == big.size() && x.cols() == p.cols) return Mode::kFull;
    if (x.size() == 1) return Mode::kScalar;
    if (x.rows() == 1 && x.cols() == p.cols) return Mode::kRow;
    throw DimensionError(std::string(op) + ": cannot broadcast " +
                         shape_string(a.shape()) + " with " + shape_string(b.shape()));
  };
  p.a = mode(a);
  p.b = mode(b);
  return p;
}

template <typename T, typename F, typename DA, typename DB>
BasicVar<T> binary(BasicVar<T> a, BasicVar<T> b, const char* name, F f, DA da, DB db) {
  BasicTape<T>& tape = *a.tape();
  if (b.tape() != &tape) throw ContractError(std::string(name) + ": operands on different tapes");
  const BasicTensor<T>& av = a.value();
  const BasicTensor<T>& bv = b.value();
  const Plan p = plan(av, bv, name);
  BasicTensor<T> out(p.shape);
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      out[at(Mode::kFull, r, c, p.cols)] =
          f(av[at(p.a, r, c, p.cols)], bv[at(p.b, r, c, p.cols)]);
    }
  }
  const bool rg = tape.requires_grad(a.id()) || tape.requires_grad(b.id());
  const int ia = a.id();
  const int ib = b.id();
  return tape.record(std::move(out), rg, [p, ia, ib, da, db](BasicTape<T>& t, int self) {
    const BasicTensor<T>& g = t.grad(self);
    const BasicTensor<T>& av = t.value(ia);
    const BasicTensor<T>& bv = t.value(ib);
    const bool ga = t.requires_grad(ia);
    const bool gb = t.requires_grad(ib);
    BasicTensor<T>* gra = ga ? &t.grad_ref(ia) : nullptr;
    BasicTensor<T>* grb = gb ? &t.grad_ref(ib) : nullptr;
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) {
        const size_t o = at(Mode::kFull, r, c, p.cols);
        const size_t xa = at(p.a, r, c, p.cols);
        const size_t xb = at(p.b, r, c, p.cols);
        if (gra) (*gra)[xa] += g[o] * da(av[xa], bv[xb]);
        if (grb) (*grb)[xb] += g[o] * db(av[xa], bv[xb]);
      }
    }
  });
}

// df receives (input, output).
template <typename T, typename F, typename DF>
BasicVar<T> unary(BasicVar<T> a, F f, DF df) {
  BasicTape<T>& tape = *a.tape();
  const BasicTensor<T>& av = a.value();
  BasicTensor<T> out(av.shape());
  for (size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const int ia = a.id();
  return tape.record(std::move(out), tape.requires_grad(ia), [ia, df](BasicTape<T>& t, int self) {
    if (!t.requires_grad(ia)) return;
    const BasicTensor<T>& g = t.grad(self);
    const BasicTensor<T>& x = t.value(ia);
    const BasicTensor<T>& y = t.value(self);
    BasicTensor<T>& gx = t.grad_ref(ia);
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(x[i], y[i]);
  });
}

}  // namespace

template <typename T>
BasicVar<T> add(BasicVar<T> a, BasicVar<T> b) {
  return binary(
      a, b, "add", [](T x, T y) { return x + y; }, [](T, T) { return T(1); },
      [](T, T) { return T(1); });
}

template <typename T>
BasicVar<T> sub(BasicVar<T> a, BasicVar<T> b) {
  return binary(
      a, b, "sub", [](T x, T y) { return x - y; }, [](T, T) { return T(1); },
      [](T, T) { return T(-1); });
}

template <typename T>
BasicVar<T> mul(BasicVar<T> a, BasicVar<T> b) {
  return binary(
      a, b, "mul", [](T x, T y) { return x * y; }, [](T, T y) { return y; },
      [](T x, T) { return x; });
}

template <typename T>
BasicVar<T> minimum(BasicVar<T> a, BasicVar<T> b) {
  return binary(
      a, b, "minimum", [](T x, T y) { return std::min(x, y); },
      [](T x, T y) { return x <= y ? T(1) : T(0); },
      [](T x, T y) { return x <= y ? T(0) : T(1); });
}

template <typename T>
BasicVar<T> scale(BasicVar<T> a, T s) {
  return unary(a, [s](T x) { return s * x; }, [s](T, T) { return s; });
}

template <typename T>
BasicVar<T> add_scalar(BasicVar<T> a, T s) {
  return unary(a, [s](T x) { return x + s; }, [](T, T) { return T(1); });
}

template <typename T>
BasicVar<T> exp(BasicVar<T> a) {
  return unary(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
BasicVar<T> log(BasicVar<T> a) {
  return unary(a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
BasicVar<T> tanh(BasicVar<T> a) {
  return unary(a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
BasicVar<T> relu(BasicVar<T> a) {
  return unary(
      a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
BasicVar<T> square(BasicVar<T> a) {
  return unary(a, [](T x) { return x * x; }, [](T x, T) { return T(2) * x; });
}

template <typename T>
BasicVar<T> clamp(BasicVar<T> a, T lo, T hi) {
  return unary(
      a, [lo, hi](T x) { return std::clamp(x, lo, hi); },
      [lo, hi](T x, T) { return (x > lo && x < hi) ? T(1) : T(0); });
}

template <typename T>
BasicVar<T> sum(BasicVar<T> a) {
  BasicTape<T>& tape = *a.tape();
  double acc = 0.0;
  for (T v : a.value().values()) acc += static_cast<double>(v);
  const int ia = a.id();
  return tape.record(BasicTensor<T>::scalar(static_cast<T>(acc)), tape.requires_grad(ia),
                     [ia](BasicTape<T>& t, int self) {
                       const T g = t.grad(self)[0];
                       BasicTensor<T>& gx = t.grad_ref(ia);
                       for (size_t i = 0; i < gx.size(); ++i) gx[i] += g;
                     });
}

template <typename T>
BasicVar<T> mean(BasicVar<T> a) {
  const size_t n = a.value().size();
  if (n == 0) throw DimensionError("mean of empty tensor");
  return scale(sum(a), static_cast<T>(1.0 / static_cast<double>(n)));
}

template <typename T>
BasicVar<T> sum_last(BasicVar<T> a) {
  BasicTape<T>& tape = *a.tape();
  const BasicTensor<T>& av = a.value();
  std::vector<int> shape = av.shape();
  shape.back() = 1;
  BasicTensor<T> out(shape);
  const int rows = av.rows();
  const int cols = av.cols();
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += static_cast<double>(av[static_cast<size_t>(r * cols + c)]);
    out[static_cast<size_t>(r)] = static_cast<T>(acc);
  }
  const int ia = a.id();
  return tape.record(std::move(out), tape.requires_grad(ia), [ia, rows, cols](BasicTape<T>& t, int self) {
    const BasicTensor<T>& g = t.grad(self);
    BasicTensor<T>& gx = t.grad_ref(ia);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) gx[static_cast<size_t>(r * cols + c)] += g[static_cast<size_t>(r)];
    }
  });
}

template <typename T>
BasicVar<T> linear(BasicVar<T> x, BasicVar<T> w, BasicVar<T> b) {
  BasicTape<T>& tape = *x.tape();
  const BasicTensor<T>& xv = x.value();
  const BasicTensor<T>& wv = w.value();
  const BasicTensor<T>& bv = b.value();
  if (wv.rank() != 2 || xv.cols() != wv.dim(0)) {
    throw DimensionError("linear: input " + shape_string(xv.shape()) +
                         " incompatible with weight " + shape_string(wv.shape()));
  }
  if (static_cast<int>(bv.size()) != wv.dim(1)) {
    throw DimensionError("linear: bias " + shape_string(bv.shape()) +
                         " does not match weight " + shape_string(wv.shape()));
  }
  std::vector<int> shape = xv.shape();
  shape.back() = wv.dim(1);
  BasicTensor<T> out(shape);
  {
    auto y = out.matrix();
    y.noalias() = xv.matrix() * wv.matrix();
    y.rowwise() += ConstRowVectorMap<T>(bv.data(), wv.dim(1));
  }
  const int ix = x.id();
  const int iw = w.id();
  const int ib = b.id();
  const bool rg = tape.requires_grad(ix) || tape.requires_grad(iw) || tape.requires_grad(ib);
  return tape.record(std::move(out), rg, [ix, iw, ib](BasicTape<T>& t, int self) {
    const auto g = t.grad(self).matrix();
    if (t.requires_grad(ix)) t.grad_ref(ix).matrix().noalias() += g * t.value(iw).matrix().transpose();
    if (t.requires_grad(iw)) t.grad_ref(iw).matrix().noalias() += t.value(ix).matrix().transpose() * g;
    if (t.requires_grad(ib)) {
      BasicTensor<T>& gb = t.grad_ref(ib);
      MatrixMap<T>(gb.data(), 1, static_cast<int>(gb.size())) += g.colwise().sum();
    }
  });
}

template <typename T>
BasicVar<T> conv1d(BasicVar<T> x, BasicVar<T> w, BasicVar<T> b, int kernel, int stride) {
  BasicTape<T>& tape = *x.tape();
  const BasicTensor<T>& xv = x.value();
  const BasicTensor<T>& wv = w.value();
  if (xv.rank() != 3) {
    throw DimensionError("conv1d: expected (batch, length, channels), got " + shape_string(xv.shape()));
  }
  if (kernel < 1 || stride < 1) throw DimensionError("conv1d: kernel and stride must be >= 1");
  const int batch = xv.dim(0);
  const int length = xv.dim(1);
  const int in_ch = xv.dim(2);
  if (wv.rank() != 2 || wv.dim(0) != kernel * in_ch) {
    throw DimensionError("conv1d: weight " + shape_string(wv.shape()) + " does not match kernel " +
                         std::to_string(kernel) + " x channels " + std::to_string(in_ch));
  }
  const int out_ch = wv.dim(1);
  if (static_cast<int>(b.value().size()) != out_ch) throw DimensionError("conv1d: bias size mismatch");
  const int out_len = conv_output_length(length, kernel, stride);
  if (out_len < 1) {
    throw DimensionError("history window too small: length " + std::to_string(length) +
                         " < kernel " + std::to_string(kernel));
  }
  using Strided = Eigen::Map<const RowMatrix<T>, 0, Eigen::OuterStride<>>;
  BasicTensor<T> out({batch, out_len, out_ch});
  const ConstRowVectorMap<T> bias(b.value().data(), out_ch);
  for (int n = 0; n < batch; ++n) {
    Strided win(xv.data() + static_cast<size_t>(n) * length * in_ch, out_len, kernel * in_ch,
                Eigen::OuterStride<>(stride * in_ch));
    MatrixMap<T> y(out.data() + static_cast<size_t>(n) * out_len * out_ch, out_len, out_ch);
    y.noalias() = win * wv.matrix();
    y.rowwise() += bias;
  }
  const int ix = x.id();
  const int iw = w.id();
  const int ib = b.id();
  const bool rg = tape.requires_grad(ix) || tape.requires_grad(iw) || tape.requires_grad(ib);
  return tape.record(std::move(out), rg,
                     [=](BasicTape<T>& t, int self) {
                       const BasicTensor<T>& g = t.grad(self);
                       const BasicTensor<T>& xv = t.value(ix);
                       const auto wm = t.value(iw).matrix();
                       const bool gx = t.requires_grad(ix);
                       const bool gw = t.requires_grad(iw);
                       const bool gb = t.requires_grad(ib);
                       RowMatrix<T> dwin;
                       for (int n = 0; n < batch; ++n) {
                         ConstMatrixMap<T> gy(g.data() + static_cast<size_t>(n) * out_len * out_ch,
                                              out_len, out_ch);
                         Strided win(xv.data() + static_cast<size_t>(n) * length * in_ch, out_len,
                                     kernel * in_ch, Eigen::OuterStride<>(stride * in_ch));
                         if (gw) t.grad_ref(iw).matrix().noalias() += win.transpose() * gy;
                         if (gb) {
                           BasicTensor<T>& gbias = t.grad_ref(ib);
                           RowVectorMap<T>(gbias.data(), out_ch) += gy.colwise().sum();
                         }
                         if (gx) {
                           dwin.noalias() = gy * wm.transpose();
                           T* base = t.grad_ref(ix).data() + static_cast<size_t>(n) * length * in_ch;
                           for (int s = 0; s < out_len; ++s) {
                             T* dst = base + static_cast<size_t>(s) * stride * in_ch;
                             for (int k = 0; k < kernel * in_ch; ++k) dst[k] += dwin(s, k);
                           }
                         }
                       }
                     });
}

template <typename T>
BasicVar<T> concat_last(BasicVar<T> a, BasicVar<T> b) {
  BasicTape<T>& tape = *a.tape();
  const BasicTensor<T>& av = a.value();
  const BasicTensor<T>& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw DimensionError("concat_last: row mismatch " + shape_string(av.shape()) + " vs " +
                         shape_string(bv.shape()));
  }
  const int ca = av.cols();
  const int cb = bv.cols();
  std::vector<int> shape = av.shape();
  shape.back() = ca + cb;
  BasicTensor<T> out(shape);
  auto y = out.matrix();
  y.leftCols(ca) = av.matrix();
  y.rightCols(cb) = bv.matrix();
  const int ia = a.id();
  const int ib = b.id();
  const bool rg = tape.requires_grad(ia) || tape.requires_grad(ib);
  return tape.record(std::move(out), rg, [ia, ib, ca, cb](BasicTape<T>& t, int self) {
    const auto g = t.grad(self).matrix();
    if (t.requires_grad(ia)) t.grad_ref(ia).matrix() += g.leftCols(ca);
    if (t.requires_grad(ib)) t.grad_ref(ib).matrix() += g.rightCols(cb);
  });
}

template <typename T>
BasicVar<T> reshape(BasicVar<T> a, std::vector<int> shape) {
  BasicTape<T>& tape = *a.tape();
  BasicTensor<T> out = a.value().reshaped(std::move(shape));
  const int ia = a.id();
  return tape.record(std::move(out), tape.requires_grad(ia), [ia](BasicTape<T>& t, int self) {
    const BasicTensor<T>& g = t.grad(self);
    BasicTensor<T>& gx = t.grad_ref(ia);
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

template <typename T>
BasicVar<T> detach(BasicVar<T> a) {
  return a.tape()->constant(a.value());
}

#define ARMA_INSTANTIATE(T)                                                            \
  template class BasicTape<T>;                                                         \
  template BasicVar<T> add(BasicVar<T>, BasicVar<T>);                                  \
  template BasicVar<T> sub(BasicVar<T>, BasicVar<T>);                                  \
  template BasicVar<T> mul(BasicVar<T>, BasicVar<T>);                                  \
  template BasicVar<T> minimum(BasicVar<T>, BasicVar<T>);                              \
  template BasicVar<T> scale(BasicVar<T>, T);                                          \
  template BasicVar<T> add_scalar(BasicVar<T>, T);                                     \
  template BasicVar<T> exp(BasicVar<T>);                                               \
  template BasicVar<T> log(BasicVar<T>);                                               \
  template BasicVar<T> tanh(BasicVar<T>);                                              \
  template BasicVar<T> relu(BasicVar<T>);                                              \
  template BasicVar<T> square(BasicVar<T>);                                            \
  template BasicVar<T> clamp(BasicVar<T>, T, T);                                       \
  template BasicVar<T> sum(BasicVar<T>);                                               \
  template BasicVar<T> mean(BasicVar<T>);                                              \
  template BasicVar<T> sum_last(BasicVar<T>);                                          \
  template BasicVar<T> linear(BasicVar<T>, BasicVar<T>, BasicVar<T>);                  \
  template BasicVar<T> conv1d(BasicVar<T>, BasicVar<T>, BasicVar<T>, int, int);        \
  template BasicVar<T> concat_last(BasicVar<T>, BasicVar<T>);                          \
  template BasicVar<T> reshape(BasicVar<T>, std::vector<int>);                         \
  template BasicVar<T> detach(BasicVar<T>);

ARMA_INSTANTIATE(float)
ARMA_INSTANTIATE(double)

#undef ARMA_INSTANTIATE

}  // namespace arma::nn
