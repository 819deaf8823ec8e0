// Copyright 2026 The GOAS Authors.
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

#include "goas/nn/layers.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>

namespace goas::nn {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
void fill_uniform(Tensor<T>& t, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.values()) v = static_cast<T>(dist(rng));
}

double he_bound(int fan_in, double slope) {
  const double gain = std::sqrt(2.0 / (1.0 + slope * slope));
  return gain * std::sqrt(3.0 / std::max(fan_in, 1));
}

void require_rank(const Shape& shape, int rank, const std::string& who) {
  if (static_cast<int>(shape.size()) != rank) {
    throw ShapeError(who + ": expected rank " + std::to_string(rank) + " input, got " + shape_string(shape));
  }
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(int in_channels, int out_channels, int kernel, int stride, int padding, std::string name)
    : in_(in_channels),
      out_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_(name + ".weight", {out_channels, in_channels * kernel * kernel}),
      bias_(name + ".bias", {out_channels}) {}

template <typename T>
void Conv2d<T>::init_he(std::mt19937_64& rng, double slope) {
  fill_uniform(weight_.value, rng, he_bound(in_ * kernel_ * kernel_, slope));
  bias_.value.zero();
}

template <typename T>
void Conv2d<T>::init_zero() {
  weight_.value.zero();
  bias_.value.zero();
}

template <typename T>
void Conv2d<T>::im2col(const T* x, int height, int width, T* cols) const {
  const int oh = out_size(height), ow = out_size(width);
  std::size_t row = 0;
  for (int c = 0; c < in_; ++c) {
    const T* plane = x + static_cast<std::size_t>(c) * height * width;
    for (int ky = 0; ky < kernel_; ++ky) {
      for (int kx = 0; kx < kernel_; ++kx, ++row) {
        T* dst = cols + row * oh * ow;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride_ - padding_ + ky;
          T* line = dst + oy * ow;
          if (iy < 0 || iy >= height) {
            std::fill(line, line + ow, T(0));
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(iy) * width;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride_ - padding_ + kx;
            line[ox] = (ix >= 0 && ix < width) ? src[ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void Conv2d<T>::col2im(const T* cols, int height, int width, T* dx) const {
  const int oh = out_size(height), ow = out_size(width);
  std::size_t row = 0;
  for (int c = 0; c < in_; ++c) {
    T* plane = dx + static_cast<std::size_t>(c) * height * width;
    for (int ky = 0; ky < kernel_; ++ky) {
      for (int kx = 0; kx < kernel_; ++kx, ++row) {
        const T* src = cols + row * oh * ow;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride_ - padding_ + ky;
          if (iy < 0 || iy >= height) continue;
          T* line = plane + static_cast<std::size_t>(iy) * width;
          const T* col_line = src + oy * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride_ - padding_ + kx;
            if (ix >= 0 && ix < width) line[ix] += col_line[ox];
          }
        }
      }
    }
  }
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  require_rank(x.shape(), 4, weight_.name);
  if (x.dim(1) != in_) {
    throw ShapeError(weight_.name + ": expected " + std::to_string(in_) + " input channels, got " +
                     shape_string(x.shape()));
  }
  const int batch = x.dim(0), height = x.dim(2), width = x.dim(3);
  const int oh = out_size(height), ow = out_size(width);
  if (oh <= 0 || ow <= 0) throw ShapeError(weight_.name + ": input too small " + shape_string(x.shape()));
  input_ = x;
  Tensor<T> out({batch, out_, oh, ow});
  const int k = in_ * kernel_ * kernel_;
  const int p = oh * ow;
  const bool pointwise = kernel_ == 1 && stride_ == 1 && padding_ == 0;
  if (!pointwise) cols_.resize(static_cast<std::size_t>(k) * p);
  ConstMatrixMap<T> w(weight_.value.data(), out_, k);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias_.value.data(), out_);
  for (int n = 0; n < batch; ++n) {
    const T* xn = x.data() + n * x.stride0();
    if (!pointwise) im2col(xn, height, width, cols_.data());
    ConstMatrixMap<T> cols(pointwise ? xn : cols_.data(), k, p);
    MatrixMap<T> y(out.data() + n * out.stride0(), out_, p);
    y.noalias() = w * cols;
    y.colwise() += b;
  }
  return out;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& grad_out) {
  const int batch = input_.dim(0), height = input_.dim(2), width = input_.dim(3);
  const int oh = out_size(height), ow = out_size(width);
  if (grad_out.shape() != Shape{batch, out_, oh, ow}) {
    throw ShapeError(weight_.name + ": gradient shape " + shape_string(grad_out.shape()));
  }
  const int k = in_ * kernel_ * kernel_;
  const int p = oh * ow;
  const bool pointwise = kernel_ == 1 && stride_ == 1 && padding_ == 0;
  Tensor<T> dx(input_.shape());
  AlignedVector<T> dcols(pointwise ? 0 : static_cast<std::size_t>(k) * p);
  if (!pointwise) cols_.resize(static_cast<std::size_t>(k) * p);
  ConstMatrixMap<T> w(weight_.value.data(), out_, k);
  MatrixMap<T> dw(weight_.grad.data(), out_, k);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(bias_.grad.data(), out_);
  for (int n = 0; n < batch; ++n) {
    const T* xn = input_.data() + n * input_.stride0();
    ConstMatrixMap<T> dy(grad_out.data() + n * grad_out.stride0(), out_, p);
    if (this->param_grads_) {
      if (!pointwise) im2col(xn, height, width, cols_.data());
      ConstMatrixMap<T> cols(pointwise ? xn : cols_.data(), k, p);
      dw.noalias() += dy * cols.transpose();
      db += dy.rowwise().sum();
    }
    T* dxn = dx.data() + n * dx.stride0();
    if (pointwise) {
      MatrixMap<T> dxm(dxn, k, p);
      dxm.noalias() = w.transpose() * dy;
    } else {
      MatrixMap<T> dc(dcols.data(), k, p);
      dc.noalias() = w.transpose() * dy;
      col2im(dcols.data(), height, width, dxn);
    }
  }
  return dx;
}

// ------------------------------------------------------ DepthwiseConv2d

template <typename T>
DepthwiseConv2d<T>::DepthwiseConv2d(int channels, int stride, std::string name)
    : channels_(channels),
      stride_(stride),
      weight_(name + ".weight", {channels, 9}),
      bias_(name + ".bias", {channels}) {}

template <typename T>
void DepthwiseConv2d<T>::init_he(std::mt19937_64& rng, double slope) {
  fill_uniform(weight_.value, rng, he_bound(9, slope));
  bias_.value.zero();
}

template <typename T>
Tensor<T> DepthwiseConv2d<T>::forward(const Tensor<T>& x) {
  require_rank(x.shape(), 4, weight_.name);
  if (x.dim(1) != channels_) throw ShapeError(weight_.name + ": channel mismatch " + shape_string(x.shape()));
  const int batch = x.dim(0), height = x.dim(2), width = x.dim(3);
  const int oh = (height - 1) / stride_ + 1, ow = (width - 1) / stride_ + 1;
  input_ = x;
  Tensor<T> out({batch, channels_, oh, ow});
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels_; ++c) {
      const T* kw = weight_.value.data() + c * 9;
      const T* plane = &x.at(n, c, 0, 0);
      T* dst = &out.at(n, c, 0, 0);
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          T acc = bias_.value[c];
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride_ - 1 + ky;
            if (iy < 0 || iy >= height) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride_ - 1 + kx;
              if (ix < 0 || ix >= width) continue;
              acc += kw[ky * 3 + kx] * plane[iy * width + ix];
            }
          }
          dst[oy * ow + ox] = acc;
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> DepthwiseConv2d<T>::backward(const Tensor<T>& grad_out) {
  const int batch = input_.dim(0), height = input_.dim(2), width = input_.dim(3);
  const int oh = grad_out.dim(2), ow = grad_out.dim(3);
  Tensor<T> dx(input_.shape());
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels_; ++c) {
      const T* kw = weight_.value.data() + c * 9;
      T* dkw = weight_.grad.data() + c * 9;
      const T* plane = &input_.at(n, c, 0, 0);
      T* dplane = &dx.at(n, c, 0, 0);
      const T* dy = &grad_out.at(n, c, 0, 0);
      T dbias = 0;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          const T g = dy[oy * ow + ox];
          dbias += g;
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride_ - 1 + ky;
            if (iy < 0 || iy >= height) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride_ - 1 + kx;
              if (ix < 0 || ix >= width) continue;
              if (this->param_grads_) dkw[ky * 3 + kx] += g * plane[iy * width + ix];
              dplane[iy * width + ix] += g * kw[ky * 3 + kx];
            }
          }
        }
      }
      if (this->param_grads_) bias_.grad[c] += dbias;
    }
  }
  return dx;
}

// ---------------------------------------------------------------- Linear

template <typename T>
Linear<T>::Linear(int in_features, int out_features, std::string name)
    : in_(in_features),
      out_(out_features),
      weight_(name + ".weight", {out_features, in_features}),
      bias_(name + ".bias", {out_features}) {}

template <typename T>
void Linear<T>::init_he(std::mt19937_64& rng, double slope) {
  fill_uniform(weight_.value, rng, he_bound(in_, slope));
  bias_.value.zero();
}

template <typename T>
void Linear<T>::init_zero() {
  weight_.value.zero();
  bias_.value.zero();
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x) {
  require_rank(x.shape(), 2, weight_.name);
  if (x.dim(1) != in_) throw ShapeError(weight_.name + ": feature mismatch " + shape_string(x.shape()));
  input_ = x;
  const int batch = x.dim(0);
  Tensor<T> out({batch, out_});
  ConstMatrixMap<T> xm(x.data(), batch, in_);
  ConstMatrixMap<T> w(weight_.value.data(), out_, in_);
  MatrixMap<T> y(out.data(), batch, out_);
  y.noalias() = xm * w.transpose();
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias_.value.data(), out_);
  y.rowwise() += b;
  return out;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& grad_out) {
  const int batch = input_.dim(0);
  if (grad_out.shape() != Shape{batch, out_}) throw ShapeError(weight_.name + ": gradient shape mismatch");
  ConstMatrixMap<T> dy(grad_out.data(), batch, out_);
  ConstMatrixMap<T> xm(input_.data(), batch, in_);
  ConstMatrixMap<T> w(weight_.value.data(), out_, in_);
  if (this->param_grads_) {
    MatrixMap<T> dw(weight_.grad.data(), out_, in_);
    dw.noalias() += dy.transpose() * xm;
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> db(bias_.grad.data(), out_);
    db += dy.colwise().sum();
  }
  Tensor<T> dx({batch, in_});
  MatrixMap<T> dxm(dx.data(), batch, in_);
  dxm.noalias() = dy * w;
  return dx;
}

// ----------------------------------------------------------- activations

template <typename T>
Tensor<T> LeakyRelu<T>::forward(const Tensor<T>& x) {
  input_ = x;
  Tensor<T> out = x;
  for (auto& v : out.values()) v = v > 0 ? v : slope_ * v;
  return out;
}

template <typename T>
Tensor<T> LeakyRelu<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx = grad_out;
  const T* x = input_.data();
  T* d = dx.data();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(x[i] > 0)) d[i] *= slope_;
  }
  return dx;
}

template <typename T>
Tensor<T> Sigmoid<T>::forward(const Tensor<T>& x) {
  Tensor<T> out = x;
  for (auto& v : out.values()) v = T(1) / (T(1) + std::exp(-v));
  output_ = out;
  return out;
}

template <typename T>
Tensor<T> Sigmoid<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx = grad_out;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const T s = output_[i];
    dx[i] *= s * (T(1) - s);
  }
  return dx;
}

// --------------------------------------------------------------- pooling

template <typename T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x) {
  require_rank(x.shape(), 4, "max_pool2d");
  const int batch = x.dim(0), channels = x.dim(1), height = x.dim(2), width = x.dim(3);
  const int oh = height / 2, ow = width / 2;
  if (oh == 0 || ow == 0) throw ShapeError("max_pool2d: input too small " + shape_string(x.shape()));
  input_shape_ = x.shape();
  Tensor<T> out({batch, channels, oh, ow});
  argmax_.assign(out.size(), 0);
  std::size_t o = 0;
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      const std::size_t base = (static_cast<std::size_t>(n) * channels + c) * height * width;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox, ++o) {
          std::size_t best = base + static_cast<std::size_t>(2 * oy) * width + 2 * ox;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const std::size_t idx = base + static_cast<std::size_t>(2 * oy + dy) * width + 2 * ox + dx;
              if (x[idx] > x[best]) best = idx;
            }
          }
          argmax_[o] = best;
          out[o] = x[best];
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(input_shape_);
  for (std::size_t o = 0; o < grad_out.size(); ++o) dx[argmax_[o]] += grad_out[o];
  return dx;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::forward(const Tensor<T>& x) {
  require_rank(x.shape(), 4, "global_avg_pool");
  input_shape_ = x.shape();
  const int batch = x.dim(0), channels = x.dim(1);
  const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  Tensor<T> out({batch, channels});
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      const T* src = &x.at(n, c, 0, 0);
      T acc = 0;
      for (std::size_t i = 0; i < plane; ++i) acc += src[i];
      out.at(n, c) = acc / static_cast<T>(plane);
    }
  }
  return out;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(input_shape_);
  const std::size_t plane = static_cast<std::size_t>(input_shape_[2]) * input_shape_[3];
  for (int n = 0; n < input_shape_[0]; ++n) {
    for (int c = 0; c < input_shape_[1]; ++c) {
      const T g = grad_out.at(n, c) / static_cast<T>(plane);
      T* dst = &dx.at(n, c, 0, 0);
      std::fill(dst, dst + plane, g);
    }
  }
  return dx;
}

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x) {
  input_shape_ = x.shape();
  const int batch = x.dim(0);
  return x.reshaped({batch, static_cast<int>(x.size() / std::max(batch, 1))});
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& grad_out) {
  return grad_out.reshaped(input_shape_);
}

// --------------------------------------------------------- normalization

template <typename T>
Tensor<T> InstanceNorm2d<T>::forward(const Tensor<T>& x) {
  require_rank(x.shape(), 4, "instance_norm2d");
  const int planes = x.dim(0) * x.dim(1);
  const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  normalized_ = Tensor<T>(x.shape());
  inv_std_.assign(planes, T(0));
  for (int p = 0; p < planes; ++p) {
    const T* src = x.data() + p * plane;
    T* dst = normalized_.data() + p * plane;
    T mean = 0;
    for (std::size_t i = 0; i < plane; ++i) mean += src[i];
    mean /= static_cast<T>(plane);
    T var = 0;
    for (std::size_t i = 0; i < plane; ++i) var += (src[i] - mean) * (src[i] - mean);
    var /= static_cast<T>(plane);
    const T inv = T(1) / std::sqrt(var + eps_);
    inv_std_[p] = inv;
    for (std::size_t i = 0; i < plane; ++i) dst[i] = (src[i] - mean) * inv;
  }
  return normalized_;
}

template <typename T>
Tensor<T> InstanceNorm2d<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(normalized_.shape());
  const int planes = static_cast<int>(inv_std_.size());
  const std::size_t plane = planes ? normalized_.size() / planes : 0;
  for (int p = 0; p < planes; ++p) {
    const T* y = normalized_.data() + p * plane;
    const T* dy = grad_out.data() + p * plane;
    T* d = dx.data() + p * plane;
    T mean_dy = 0, mean_dy_y = 0;
    for (std::size_t i = 0; i < plane; ++i) {
      mean_dy += dy[i];
      mean_dy_y += dy[i] * y[i];
    }
    mean_dy /= static_cast<T>(plane);
    mean_dy_y /= static_cast<T>(plane);
    for (std::size_t i = 0; i < plane; ++i) d[i] = inv_std_[p] * (dy[i] - mean_dy - y[i] * mean_dy_y);
  }
  return dx;
}

// ------------------------------------------------------------ Sequential

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x) {
  Tensor<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
std::vector<Parameter<T>*> Sequential<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& layer : layers_) {
    for (auto* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
void Sequential<T>::set_param_grads(bool enabled) {
  for (auto& layer : layers_) layer->set_param_grads(enabled);
}

// --------------------------------------------------------------- softmax

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  require_rank(logits.shape(), 2, "softmax");
  Tensor<T> out(logits.shape());
  const int rows = logits.dim(0), cols = logits.dim(1);
  for (int r = 0; r < rows; ++r) {
    T peak = -std::numeric_limits<T>::infinity();
    for (int c = 0; c < cols; ++c) peak = std::max(peak, logits.at(r, c));
    T total = 0;
    for (int c = 0; c < cols; ++c) {
      out.at(r, c) = std::exp(logits.at(r, c) - peak);
      total += out.at(r, c);
    }
    for (int c = 0; c < cols; ++c) out.at(r, c) /= total;
  }
  return out;
}

template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& probs, const Tensor<T>& grad_probs) {
  probs.require_same_shape(grad_probs, "softmax_backward");
  Tensor<T> out(probs.shape());
  const int rows = probs.dim(0), cols = probs.dim(1);
  for (int r = 0; r < rows; ++r) {
    T dot = 0;
    for (int c = 0; c < cols; ++c) dot += probs.at(r, c) * grad_probs.at(r, c);
    for (int c = 0; c < cols; ++c) out.at(r, c) = probs.at(r, c) * (grad_probs.at(r, c) - dot);
  }
  return out;
}

#define GOAS_INSTANTIATE(T)                                                  \
  template class Conv2d<T>;                                                  \
  template class DepthwiseConv2d<T>;                                         \
  template class Linear<T>;                                                  \
  template class LeakyRelu<T>;                                               \
  template class Sigmoid<T>;                                                 \
  template class MaxPool2d<T>;                                               \
  template class GlobalAvgPool<T>;                                           \
  template class Flatten<T>;                                                 \
  template class InstanceNorm2d<T>;                                          \
  template class Sequential<T>;                                              \
  template Tensor<T> softmax<T>(const Tensor<T>&);                           \
  template Tensor<T> softmax_backward<T>(const Tensor<T>&, const Tensor<T>&);

GOAS_INSTANTIATE(float)
GOAS_INSTANTIATE(double)

#undef GOAS_INSTANTIATE

}  // namespace goas::nn
