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

#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "goas/tensor.hpp"

namespace goas::nn {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Shape shape) : name(std::move(n)), value(shape), grad(shape) {}
};

// A differentiable stage. forward() caches whatever backward() needs, so a
// backward call always refers to the most recent forward call.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  // Returns d(loss)/d(input) and, unless disabled, accumulates parameter
  // gradients into Parameter::grad.
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual std::vector<Parameter<T>*> parameters() { return {}; }
  virtual std::string kind() const = 0;

  void set_param_grads(bool enabled) { param_grads_ = enabled; }
  bool param_grads() const { return param_grads_; }

 protected:
  bool param_grads_ = true;
};

// 2-D convolution with square kernels, zero padding and optional stride.
template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(int in_channels, int out_channels, int kernel, int stride, int padding, std::string name);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "conv2d"; }

  // He-uniform for leaky-ReLU with the given negative slope.
  void init_he(std::mt19937_64& rng, double slope);
  void init_zero();

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }

 private:
  void im2col(const T* x, int height, int width, T* cols) const;
  void col2im(const T* cols, int height, int width, T* dx) const;
  int out_size(int n) const { return (n + 2 * padding_ - kernel_) / stride_ + 1; }

  int in_, out_, kernel_, stride_, padding_;
  Parameter<T> weight_;  // out x (in * k * k)
  Parameter<T> bias_;    // out
  Tensor<T> input_;
  AlignedVector<T> cols_;
};

// Per-channel 3x3 convolution (channel multiplier 1).
template <typename T>
class DepthwiseConv2d final : public Layer<T> {
 public:
  DepthwiseConv2d(int channels, int stride, std::string name);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "depthwise_conv2d"; }

  void init_he(std::mt19937_64& rng, double slope);

 private:
  int channels_, stride_;
  Parameter<T> weight_;  // channels x 9
  Parameter<T> bias_;
  Tensor<T> input_;
};

template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(int in_features, int out_features, std::string name);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "linear"; }

  void init_he(std::mt19937_64& rng, double slope);
  void init_zero();

 private:
  int in_, out_;
  Parameter<T> weight_;  // out x in
  Parameter<T> bias_;
  Tensor<T> input_;
};

template <typename T>
class LeakyRelu final : public Layer<T> {
 public:
  explicit LeakyRelu(T slope) : slope_(slope) {}
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "leaky_relu"; }

 private:
  T slope_;
  Tensor<T> input_;
};

template <typename T>
class Sigmoid final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "sigmoid"; }

 private:
  Tensor<T> output_;
};

template <typename T>
class MaxPool2d final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "max_pool2d"; }

 private:
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
};

template <typename T>
class GlobalAvgPool final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "global_avg_pool"; }

 private:
  Shape input_shape_;
};

template <typename T>
class Flatten final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "flatten"; }

 private:
  Shape input_shape_;
};

// Per-sample, per-channel normalization without affine parameters.
template <typename T>
class InstanceNorm2d final : public Layer<T> {
 public:
  explicit InstanceNorm2d(T eps = T(1e-5)) : eps_(eps) {}
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "instance_norm2d"; }

 private:
  T eps_;
  Tensor<T> normalized_;
  std::vector<T> inv_std_;
};

template <typename T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& grad_out);
  std::vector<Parameter<T>*> parameters();
  void set_param_grads(bool enabled);
  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// Row-wise softmax of an N x K matrix.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

// Given softmax probabilities p and d(loss)/dp, returns d(loss)/d(logits).
template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& probs, const Tensor<T>& grad_probs);

}  // namespace goas::nn
