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

#include "goas/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace goas {

void LossWeights::validate() const {
  if (!(lambda0 >= 0.0) || !(lambda1 >= 0.0)) throw ValidationError("loss weights must be nonnegative");
}

void to_json(nlohmann::json& j, const LossWeights& w) { j = {{"lambda0", w.lambda0}, {"lambda1", w.lambda1}}; }

void from_json(const nlohmann::json& j, LossWeights& w) {
  if (j.contains("lambda0")) j.at("lambda0").get_to(w.lambda0);
  if (j.contains("lambda1")) j.at("lambda1").get_to(w.lambda1);
  w.validate();
}

namespace {

template <typename T>
T clamp_prob(T p) {
  return std::clamp(p, static_cast<T>(kProbEpsilon), T(1) - static_cast<T>(kProbEpsilon));
}

// Slope of -log(p) at the unclamped probability.
template <typename T>
T neg_log_slope(T p) {
  return T(-1) / std::max(p, std::numeric_limits<T>::min());
}

void require_probs(const Shape& shape, int cols, const char* who) {
  if (shape.size() != 2 || shape[1] != cols || shape[0] < 1) {
    throw ShapeError(std::string(who) + ": expected B x " + std::to_string(cols) + " probabilities, got " +
                     shape_string(shape));
  }
}

template <typename T>
LossValue<T> mean_squared(const Tensor<T>& target, const Tensor<T>& prediction, const char* who) {
  target.require_same_shape(prediction, who);
  if (prediction.empty()) throw ShapeError(std::string(who) + ": empty input");
  const T n = static_cast<T>(prediction.size());
  LossValue<T> out{T(0), Tensor<T>(prediction.shape())};
  double total = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const T d = prediction[i] - target[i];
    total += static_cast<double>(d) * d;
    out.grad[i] = T(2) * d / n;
  }
  out.value = static_cast<T>(total / static_cast<double>(prediction.size()));
  return out;
}

// -mean log(p[:, cls]) or -mean log(1 - p[:, cls]); gradient w.r.t. the rows.
template <typename T>
T neg_log_term(const Tensor<T>& probs, int cls, bool complement, Tensor<T>& grad) {
  const int batch = probs.dim(0);
  double total = 0.0;
  for (int b = 0; b < batch; ++b) {
    const T raw = complement ? T(1) - probs.at(b, cls) : probs.at(b, cls);
    total -= std::log(static_cast<double>(clamp_prob(raw)));
    const T slope = neg_log_slope(raw) / static_cast<T>(batch);
    grad.at(b, cls) += complement ? -slope : slope;
  }
  return static_cast<T>(total / batch);
}

}  // namespace

template <typename T>
LossValue<T> vis_loss(const Tensor<T>& image, const Tensor<T>& synthesized) {
  return mean_squared(image, synthesized, "vis_loss");
}

template <typename T>
DiscTrainLoss<T> disc_train_loss(const Tensor<T>& probs_real, const Tensor<T>& probs_synth, int real_class) {
  require_probs(probs_real.shape(), 2, "disc_train_loss");
  require_probs(probs_synth.shape(), 2, "disc_train_loss");
  DiscTrainLoss<T> out{T(0), Tensor<T>(probs_real.shape()), Tensor<T>(probs_synth.shape())};
  out.value = neg_log_term(probs_real, real_class, false, out.grad_real) +
              neg_log_term(probs_synth, real_class, true, out.grad_synth);
  return out;
}

template <typename T>
LossValue<T> disc_gen_loss(const Tensor<T>& probs_synth, int real_class) {
  require_probs(probs_synth.shape(), 2, "disc_gen_loss");
  LossValue<T> out{T(0), Tensor<T>(probs_synth.shape())};
  out.value = neg_log_term(probs_synth, real_class, false, out.grad);
  return out;
}

template <typename T>
LossValue<T> cross_entropy(const Tensor<T>& probs, const Tensor<T>& targets) {
  probs.require_same_shape(targets, "cross_entropy");
  require_probs(probs.shape(), probs.dim(1), "cross_entropy");
  const int batch = probs.dim(0), classes = probs.dim(1);
  LossValue<T> out{T(0), Tensor<T>(probs.shape())};
  double total = 0.0;
  for (int b = 0; b < batch; ++b) {
    for (int k = 0; k < classes; ++k) {
      const T a = targets.at(b, k);
      if (a == T(0)) continue;
      const T p = probs.at(b, k);
      total -= static_cast<double>(a) * std::log(static_cast<double>(clamp_prob(p)));
      out.grad.at(b, k) = a * neg_log_slope(p) / static_cast<T>(batch);
    }
  }
  out.value = static_cast<T>(total / batch);
  return out;
}

template <typename T>
LabLoss<T> lab_train_loss(const LabOutput<T>& output, const Tensor<T>& sensor_targets, const Tensor<T>& medium_targets) {
  auto c = cross_entropy(output.probs_c, sensor_targets);
  auto m = cross_entropy(output.probs_m, medium_targets);
  return {c.value + m.value, c.value, m.value, std::move(c.grad), std::move(m.grad)};
}

template <typename T>
LabLoss<T> lab_gen_loss(const LabOutput<T>& output, const LiveLossStats& live, const Tensor<T>& sensor_targets,
                        const Tensor<T>& medium_targets) {
  if (!(live.sensor >= 0.0) || !(live.medium >= 0.0)) {
    throw ValidationError("lab_gen_loss: cached live losses must be nonnegative");
  }
  auto c = cross_entropy(output.probs_c, sensor_targets);
  auto m = cross_entropy(output.probs_m, medium_targets);
  const T wc = static_cast<T>(1.0 / (1.0 + live.sensor));
  const T wm = static_cast<T>(1.0 / (1.0 + live.medium));
  c.grad *= wc;
  m.grad *= wm;
  return {wm * m.value + wc * c.value, c.value, m.value, std::move(c.grad), std::move(m.grad)};
}

template <typename T>
LossValue<T> pad_loss(const Tensor<T>& map, const Tensor<T>& ground_truth) {
  return mean_squared(ground_truth, map, "pad_loss");
}

template <typename T>
Tensor<T> ground_truth_pad_map(const std::vector<bool>& is_spoof, int height, int width) {
  Tensor<T> g({static_cast<int>(is_spoof.size()), height, width});
  for (std::size_t b = 0; b < is_spoof.size(); ++b) {
    if (!is_spoof[b]) continue;
    auto row = g.slice0(static_cast<int>(b));
    std::fill(row.begin(), row.end(), T(1));
  }
  return g;
}

double combine_generator_objective(double disc_test, double vis, double lab_test, const LossWeights& weights) {
  return disc_test + weights.lambda0 * vis + weights.lambda1 * lab_test;
}

double combine_discriminator_objective(double disc_train, double lab_train, const LossWeights& weights) {
  return disc_train + weights.lambda1 * lab_train;
}

#define GOAS_INSTANTIATE(T)                                                                               \
  template LossValue<T> vis_loss<T>(const Tensor<T>&, const Tensor<T>&);                                  \
  template DiscTrainLoss<T> disc_train_loss<T>(const Tensor<T>&, const Tensor<T>&, int);                  \
  template LossValue<T> disc_gen_loss<T>(const Tensor<T>&, int);                                          \
  template LossValue<T> cross_entropy<T>(const Tensor<T>&, const Tensor<T>&);                             \
  template LabLoss<T> lab_train_loss<T>(const LabOutput<T>&, const Tensor<T>&, const Tensor<T>&);         \
  template LabLoss<T> lab_gen_loss<T>(const LabOutput<T>&, const LiveLossStats&, const Tensor<T>&,        \
                                      const Tensor<T>&);                                                  \
  template LossValue<T> pad_loss<T>(const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> ground_truth_pad_map<T>(const std::vector<bool>&, int, int);

GOAS_INSTANTIATE(float)
GOAS_INSTANTIATE(double)

#undef GOAS_INSTANTIATE

}  // namespace goas
