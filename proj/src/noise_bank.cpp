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

#include "goas/noise_bank.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace goas {

BankInit parse_bank_init(std::string_view name) {
  if (name == "zeros") return BankInit::kZeros;
  if (name == "gaussian") return BankInit::kGaussian;
  throw ValidationError("unknown prototype initialization scheme '" + std::string(name) +
                        "' (expected zeros or gaussian)");
}

template <typename T>
NoisePrototypeBank<T>::NoisePrototypeBank(int num_sensors, int num_mediums, int size)
    : sensors_("bank.sensor", {num_sensors, size, size}), mediums_("bank.medium", {num_mediums, size, size}) {
  if (num_sensors < 1 || num_mediums < 1 || size < 1) {
    throw ValidationError("prototype bank needs n_c, n_m, size >= 1");
  }
}

namespace {

template <typename T>
Tensor<T> plane(const Tensor<T>& stack, int index) {
  if (index < 0 || index >= stack.dim(0)) throw ValidationError("prototype index out of range");
  const auto span = stack.slice0(index);
  return Tensor<T>({stack.dim(1), stack.dim(2)}, std::vector<T>(span.begin(), span.end()));
}

template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& stack, std::span<const T> weights, const char* what) {
  if (static_cast<int>(weights.size()) != stack.dim(0)) {
    throw ShapeError(std::string(what) + " weight vector has length " + std::to_string(weights.size()) +
                     ", bank holds " + std::to_string(stack.dim(0)) + " prototypes");
  }
  Tensor<T> out({stack.dim(1), stack.dim(2)});
  bool first = true;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const T w = weights[i];
    if (!std::isfinite(w)) throw ValidationError(std::string(what) + " weights must be finite");
    if (w == T(0)) continue;
    const auto src = stack.slice0(static_cast<int>(i));
    if (first) {
      std::transform(src.begin(), src.end(), out.values().begin(), [w](T v) { return w * v; });
      first = false;
    } else {
      auto dst = out.values();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

template <typename T>
void scatter(Tensor<T>& grad_stack, std::span<const T> weights, const Tensor<T>& grad) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const T w = weights[i];
    if (w == T(0)) continue;
    auto dst = grad_stack.slice0(static_cast<int>(i));
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * grad[j];
  }
}

}  // namespace

template <typename T>
Tensor<T> NoisePrototypeBank<T>::sensor(int index) const {
  return plane(sensors_.value, index);
}

template <typename T>
Tensor<T> NoisePrototypeBank<T>::medium(int index) const {
  return plane(mediums_.value, index);
}

template <typename T>
SelectedNoise<T> select_prototype(const NoisePrototypeBank<T>& bank, std::span<const T> sensor_weights,
                                  std::span<const T> medium_weights) {
  return {weighted_sum(bank.sensor_prototypes().value, sensor_weights, "sensor"),
          weighted_sum(bank.medium_prototypes().value, medium_weights, "medium")};
}

template <typename T>
void accumulate_selection_grad(NoisePrototypeBank<T>& bank, std::span<const T> sensor_weights,
                               std::span<const T> medium_weights, const Tensor<T>& grad_sensor,
                               const Tensor<T>& grad_medium) {
  scatter(bank.sensor_prototypes().grad, sensor_weights, grad_sensor);
  scatter(bank.medium_prototypes().grad, medium_weights, grad_medium);
}

template <typename T>
NoisePrototypeBank<T> init_bank(int num_sensors, int num_mediums, int size, BankInit scheme, std::uint64_t seed,
                                double stddev) {
  NoisePrototypeBank<T> bank(num_sensors, num_mediums, size);
  if (scheme == BankInit::kGaussian) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& v : bank.sensor_prototypes().value.values()) v = static_cast<T>(dist(rng));
    for (auto& v : bank.medium_prototypes().value.values()) v = static_cast<T>(dist(rng));
  }
  return bank;
}

#define GOAS_INSTANTIATE(T)                                                                              \
  template class NoisePrototypeBank<T>;                                                                  \
  template SelectedNoise<T> select_prototype<T>(const NoisePrototypeBank<T>&, std::span<const T>,        \
                                                std::span<const T>);                                     \
  template void accumulate_selection_grad<T>(NoisePrototypeBank<T>&, std::span<const T>,                 \
                                             std::span<const T>, const Tensor<T>&, const Tensor<T>&);    \
  template NoisePrototypeBank<T> init_bank<T>(int, int, int, BankInit, std::uint64_t, double);

GOAS_INSTANTIATE(float)
GOAS_INSTANTIATE(double)

#undef GOAS_INSTANTIATE

}  // namespace goas
