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

#include <cmath>
#include <cstdint>
#include <vector>

#include "goas/nn/layers.hpp"

namespace goas::nn {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // L2 coefficient added to the gradient
};

// Adaptive moment estimation over a fixed list of parameters. The moment
// buffers are indexed by position, so the parameter list must not change
// between steps or across a checkpoint round-trip.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Parameter<T>*> params, AdamOptions options) : params_(std::move(params)), options_(options) {
    for (auto* p : params_) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }

  // Per-parameter decay overrides (e.g. only the prototype bank decays).
  void set_weight_decay(std::size_t index, double decay) {
    decay_.resize(params_.size(), options_.weight_decay);
    decay_.at(index) = decay;
  }

  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    const T lr = static_cast<T>(options_.lr * std::sqrt(c2) / c1);
    const T b1 = static_cast<T>(options_.beta1), b2 = static_cast<T>(options_.beta2);
    const T eps = static_cast<T>(options_.eps);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      const T decay = static_cast<T>(decay_.empty() ? options_.weight_decay : decay_[i]);
      T* w = p.value.data();
      const T* g = p.grad.data();
      T* m = m_[i].data();
      T* v = v_[i].data();
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        const T grad = g[j] + decay * w[j];
        m[j] = b1 * m[j] + (T(1) - b1) * grad;
        v[j] = b2 * v[j] + (T(1) - b2) * grad * grad;
        w[j] -= lr * m[j] / (std::sqrt(v[j]) + eps);
      }
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->grad.zero();
  }

  // Scales gradients so their global L2 norm is at most max_norm.
  double clip_grad_norm(double max_norm) {
    double total = 0.0;
    for (auto* p : params_) {
      for (T g : p->grad.values()) total += static_cast<double>(g) * g;
    }
    total = std::sqrt(total);
    if (max_norm > 0 && total > max_norm) {
      const T scale = static_cast<T>(max_norm / total);
      for (auto* p : params_) p->grad *= scale;
    }
    return total;
  }

  std::int64_t steps() const { return t_; }
  void set_steps(std::int64_t t) { t_ = t; }
  std::vector<Tensor<T>>& first_moments() { return m_; }
  std::vector<Tensor<T>>& second_moments() { return v_; }
  const std::vector<Tensor<T>>& first_moments() const { return m_; }
  const std::vector<Tensor<T>>& second_moments() const { return v_; }
  const std::vector<Parameter<T>*>& params() const { return params_; }
  const AdamOptions& options() const { return options_; }

 private:
  std::vector<Parameter<T>*> params_;
  AdamOptions options_;
  std::vector<double> decay_;
  std::vector<Tensor<T>> m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace goas::nn
