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

#include <nlohmann/json.hpp>

#include "goas/networks.hpp"
#include "goas/tensor.hpp"

namespace goas {

// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before logs. Gradients use the
// unclamped probability.
inline constexpr double kProbEpsilon = 1e-7;

struct LossWeights {
  double lambda0 = 0.5;  // visual-quality term
  double lambda1 = 0.1;  // classifier terms
  void validate() const;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

template <typename T>
struct LossValue {
  T value{};
  Tensor<T> grad;  // with respect to the loss's primary input
};

// Mean squared difference between the input image and the synthesized one.
// Gradient is with respect to `synthesized`.
template <typename T>
LossValue<T> vis_loss(const Tensor<T>& image, const Tensor<T>& synthesized);

template <typename T>
struct DiscTrainLoss {
  T value{};
  Tensor<T> grad_real;
  Tensor<T> grad_synth;
};

// -E_R log p_real(I) - E_L log(1 - p_real(G(T))), rows of B x 2 probabilities.
template <typename T>
DiscTrainLoss<T> disc_train_loss(const Tensor<T>& probs_real, const Tensor<T>& probs_synth, int real_class = 0);

// -E_L log p_real(G(T)).
template <typename T>
LossValue<T> disc_gen_loss(const Tensor<T>& probs_synth, int real_class = 0);

// Batch mean of -sum_i target_i log(p_i).
template <typename T>
LossValue<T> cross_entropy(const Tensor<T>& probs, const Tensor<T>& targets);

template <typename T>
struct LabLoss {
  T value{};
  T sensor{};  // S_c
  T medium{};  // S_m
  Tensor<T> grad_c;
  Tensor<T> grad_m;
};

// S_c + S_m.
template <typename T>
LabLoss<T> lab_train_loss(const LabOutput<T>& output, const Tensor<T>& sensor_targets, const Tensor<T>& medium_targets);

// Classifier losses on real live images, cached from the latest classifier
// update and treated as constants by the generator.
struct LiveLossStats {
  double sensor = 0.0;
  double medium = 0.0;
};

// S_m(G)/(1 + S_m_live) + S_c(G)/(1 + S_c_live).
template <typename T>
LabLoss<T> lab_gen_loss(const LabOutput<T>& output, const LiveLossStats& live, const Tensor<T>& sensor_targets,
                        const Tensor<T>& medium_targets);

// Mean squared error between the predicted map and the 0/1 ground truth.
template <typename T>
LossValue<T> pad_loss(const Tensor<T>& map, const Tensor<T>& ground_truth);

// B x h x w map that is all 0 for live samples and all 1 for spoof samples.
template <typename T>
Tensor<T> ground_truth_pad_map(const std::vector<bool>& is_spoof, int height, int width);

double combine_generator_objective(double disc_test, double vis, double lab_test, const LossWeights& weights);
double combine_discriminator_objective(double disc_train, double lab_train, const LossWeights& weights);

}  // namespace goas
