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
#include <span>
#include <string_view>
#include <vector>

#include "goas/nn/layers.hpp"
#include "goas/tensor.hpp"

namespace goas {

enum class BankInit { kZeros, kGaussian };

BankInit parse_bank_init(std::string_view name);

// Image-independent noise prototypes: one single-channel map per sensor and
// one per medium (medium 0 is live). Both stacks are trainable parameters.
template <typename T>
class NoisePrototypeBank {
 public:
  NoisePrototypeBank() = default;
  NoisePrototypeBank(int num_sensors, int num_mediums, int size);

  int num_sensors() const { return sensors_.value.dim(0); }
  int num_mediums() const { return mediums_.value.dim(0); }
  int size() const { return sensors_.value.dim(1); }

  nn::Parameter<T>& sensor_prototypes() { return sensors_; }
  nn::Parameter<T>& medium_prototypes() { return mediums_; }
  const nn::Parameter<T>& sensor_prototypes() const { return sensors_; }
  const nn::Parameter<T>& medium_prototypes() const { return mediums_; }

  // Copy of a single prototype as an H x W map.
  Tensor<T> sensor(int index) const;
  Tensor<T> medium(int index) const;

  std::vector<nn::Parameter<T>*> parameters() { return {&sensors_, &mediums_}; }
  bool all_finite() const { return sensors_.value.all_finite() && mediums_.value.all_finite(); }

 private:
  nn::Parameter<T> sensors_;  // n_c x H x W
  nn::Parameter<T> mediums_;  // n_m x H x W
};

template <typename T>
struct SelectedNoise {
  Tensor<T> sensor;  // H x W
  Tensor<T> medium;  // H x W
};

// Weighted sum of prototypes: N_c = sum_i a_c[i] M_c[i], likewise for mediums.
// Zero weights are skipped, so a one-hot vector yields the stored map bit-for-bit.
template <typename T>
SelectedNoise<T> select_prototype(const NoisePrototypeBank<T>& bank, std::span<const T> sensor_weights,
                                  std::span<const T> medium_weights);

// Backward of select_prototype: dM_c[i] += a_c[i] * dN_c and dM_m[i] += a_m[i] * dN_m.
template <typename T>
void accumulate_selection_grad(NoisePrototypeBank<T>& bank, std::span<const T> sensor_weights,
                               std::span<const T> medium_weights, const Tensor<T>& grad_sensor,
                               const Tensor<T>& grad_medium);

// Gaussian scheme draws N(0, stddev^2) entries from a seeded generator.
template <typename T>
NoisePrototypeBank<T> init_bank(int num_sensors, int num_mediums, int size, BankInit scheme, std::uint64_t seed,
                                double stddev = 0.01);

}  // namespace goas
