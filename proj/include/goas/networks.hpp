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

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "goas/nn/layers.hpp"
#include "goas/noise_bank.hpp"
#include "goas/tensor.hpp"

namespace goas {

// Layer widths and activation choices for all four networks. Every
// convolution is 3x3 unless noted; see README for the full layer plan.
struct ArchConfig {
  std::vector<int> gen_channels{32, 32, 64, 64, 32, 32, 16};                   // 7 hidden widths, 8 convs
  std::vector<int> disc_channels{32, 32, 64, 64, 96, 96, 128, 128, 128, 128};  // 10 convs
  int disc_hidden = 128;
  std::vector<int> lab_channels{32, 32, 32, 64, 64, 64, 96, 96, 96, 128, 128};  // 11 convs
  int lab_hidden = 128;
  std::vector<int> pad_channels{21, 43, 65, 43};  // stem + three separable stages
  int pad_map_size = 32;
  std::string activation = "leaky_relu";
  double leaky_slope = 0.2;
  std::string norm = "none";
  bool gen_zero_head = true;
  bool lab_zero_head = true;
  bool pad_zero_head = true;

  double activation_slope() const;
  bool instance_norm() const;
  void validate() const;

  // Widths of the binary baseline GOPad is scaled down from.
  static std::vector<int> pad_reference_channels() { return {64, 128, 196, 128}; }
  // Tiny configuration for gradient checks (<= 4 channels per layer).
  static ArchConfig toy();
};

void to_json(nlohmann::json& j, const ArchConfig& a);
void from_json(const nlohmann::json& j, ArchConfig& a);

// How the generator is conditioned on the target sensor/medium.
enum class ConditioningMode {
  kPrototypes,  // T = [I, N_c, N_m] with learned prototypes
  kOneHotMaps,  // T = [I, M'_c, M'_m]: one constant map per class, 1 for the selected class
};

std::string to_string(ConditioningMode mode);
ConditioningMode parse_conditioning_mode(const std::string& name);
int conditioning_channels(ConditioningMode mode, int num_sensors, int num_mediums);

// Builds the B x k x H x W conditioning block from per-sample weight rows
// (B x n_c and B x n_m). The bank is required in prototype mode only.
template <typename T>
Tensor<T> build_conditioning(ConditioningMode mode, const NoisePrototypeBank<T>* bank, const Tensor<T>& sensor_weights,
                             const Tensor<T>& medium_weights, int size);

// Routes d(loss)/d(conditioning) into the bank gradients (prototype mode).
template <typename T>
void backprop_conditioning(ConditioningMode mode, NoisePrototypeBank<T>* bank, const Tensor<T>& sensor_weights,
                           const Tensor<T>& medium_weights, const Tensor<T>& grad_conditioning);

template <typename T>
class Network {
 public:
  virtual ~Network() = default;
  virtual std::vector<nn::Parameter<T>*> parameters() = 0;
  virtual void set_param_grads(bool enabled) = 0;

  void zero_grad() {
    for (auto* p : parameters()) p->grad.zero();
  }
  std::size_t parameter_count() {
    std::size_t n = 0;
    for (auto* p : parameters()) n += p->value.size();
    return n;
  }
  bool all_finite() {
    for (auto* p : parameters()) {
      if (!p->value.all_finite()) return false;
    }
    return true;
  }
};

template <typename T>
struct GeneratorGrads {
  Tensor<T> images;
  Tensor<T> conditioning;
};

// Conditional generator. Output = clamp(I + tanh(trunk([2I-1, cond])), 0, 1).
template <typename T>
class GoGen final : public Network<T> {
 public:
  GoGen(const ArchConfig& arch, int condition_channels, std::uint64_t seed);

  // images: B x 3 x H x W in [0,1]; conditioning: B x k x H x W.
  Tensor<T> forward(const Tensor<T>& images, const Tensor<T>& conditioning);
  GeneratorGrads<T> backward(const Tensor<T>& grad_output);

  std::vector<nn::Parameter<T>*> parameters() override { return trunk_.parameters(); }
  void set_param_grads(bool enabled) override { trunk_.set_param_grads(enabled); }
  int condition_channels() const { return condition_channels_; }

 private:
  int condition_channels_;
  nn::Sequential<T> trunk_;
  Tensor<T> tanh_;
  std::vector<unsigned char> pass_;  // 1 where the output clamp is inactive
};

// Binary discriminator: probabilities of (real spoof, synthesized).
template <typename T>
class GoDisc final : public Network<T> {
 public:
  static constexpr int kRealClass = 0;
  static constexpr int kSynthClass = 1;

  GoDisc(const ArchConfig& arch, int patch_size, std::uint64_t seed);

  Tensor<T> forward(const Tensor<T>& images);  // B x 2 probabilities
  Tensor<T> backward(const Tensor<T>& grad_probs);

  std::vector<nn::Parameter<T>*> parameters() override { return net_.parameters(); }
  void set_param_grads(bool enabled) override { net_.set_param_grads(enabled); }

 private:
  int patch_size_;
  nn::Sequential<T> net_;
  Tensor<T> probs_;
};

template <typename T>
struct LabOutput {
  Tensor<T> logits_c;  // B x n_c
  Tensor<T> logits_m;  // B x n_m
  Tensor<T> probs_c;
  Tensor<T> probs_m;
};

// Sensor / medium classifier with a shared convolutional trunk and two
// independent fully connected heads.
template <typename T>
class GoLab final : public Network<T> {
 public:
  GoLab(const ArchConfig& arch, int num_sensors, int num_mediums, std::uint64_t seed);

  LabOutput<T> forward(const Tensor<T>& images);
  // Either gradient may be empty, meaning that head does not contribute.
  Tensor<T> backward(const Tensor<T>& grad_probs_c, const Tensor<T>& grad_probs_m);

  std::vector<nn::Parameter<T>*> parameters() override;
  void set_param_grads(bool enabled) override;
  int num_sensors() const { return num_sensors_; }
  int num_mediums() const { return num_mediums_; }

 private:
  int num_sensors_, num_mediums_;
  nn::Sequential<T> trunk_, head_c_, head_m_;
  LabOutput<T> last_;
  Shape input_shape_;
};

// Spoof score of each row: 1 - P(live medium).
template <typename T>
std::vector<double> golab_spoof_score(const LabOutput<T>& output);

// Binary baseline producing a B x h x w map in [0,1].
template <typename T>
class GoPad final : public Network<T> {
 public:
  GoPad(const ArchConfig& arch, int patch_size, std::uint64_t seed);
  // Same topology at explicit widths (used for the reference-width count).
  GoPad(const ArchConfig& arch, const std::vector<int>& channels, int patch_size, std::uint64_t seed);

  Tensor<T> forward(const Tensor<T>& images);  // B x h x w
  Tensor<T> backward(const Tensor<T>& grad_map);

  std::vector<nn::Parameter<T>*> parameters() override { return net_.parameters(); }
  void set_param_grads(bool enabled) override { net_.set_param_grads(enabled); }
  int map_size() const { return map_size_; }

 private:
  int patch_size_, map_size_;
  nn::Sequential<T> net_;
};

}  // namespace goas
