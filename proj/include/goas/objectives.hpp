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

#include "goas/losses.hpp"
#include "goas/networks.hpp"
#include "goas/noise_bank.hpp"

namespace goas {

// Non-owning view of the networks taking part in adversarial training.
template <typename T>
struct GanModels {
  GoGen<T>* gen = nullptr;
  GoDisc<T>* disc = nullptr;
  GoLab<T>* lab = nullptr;
  NoisePrototypeBank<T>* bank = nullptr;  // null in one-hot-map mode
  ConditioningMode mode = ConditioningMode::kPrototypes;
};

template <typename T>
struct GeneratorObjective {
  double total = 0.0;
  double disc_test = 0.0;
  double vis = 0.0;
  double lab_test = 0.0;
  double sensor = 0.0;  // S_c on synthesized images
  double medium = 0.0;  // S_m on synthesized images
  Tensor<T> synthesized;
};

// J_Disc_test + lambda0 J_Vis + lambda1 J_Lab_test. Accumulates gradients into
// the generator and the prototype bank; discriminator and classifier
// parameter gradients are left untouched.
template <typename T>
GeneratorObjective<T> generator_objective(GanModels<T>& models, const Tensor<T>& live, const Tensor<T>& target_c,
                                          const Tensor<T>& target_m, const LiveLossStats& live_stats,
                                          const LossWeights& weights);

template <typename T>
struct DiscriminatorObjective {
  double total = 0.0;
  double disc_train = 0.0;
  double lab_train = 0.0;
  double sensor = 0.0;       // S_c over live + spoof
  double medium = 0.0;       // S_m over live + spoof
  LiveLossStats live;        // S_c, S_m over the live rows only
  double disc_accuracy = 0.0;
};

// Labelled real data for one discriminator-phase step.
template <typename T>
struct RealBatch {
  Tensor<T> images;  // B x 3 x H x W
  Tensor<T> sensor;  // B x n_c one-hot
  Tensor<T> medium;  // B x n_m one-hot
};

// J_Disc_train + lambda1 J_Lab_train. The generator only runs forward;
// gradients reach the discriminator and classifier parameters.
template <typename T>
DiscriminatorObjective<T> discriminator_objective(GanModels<T>& models, const RealBatch<T>& live,
                                                  const RealBatch<T>& spoof, const Tensor<T>& target_c,
                                                  const Tensor<T>& target_m, const LossWeights& weights);

// Runs the generator for the given targets without touching gradients.
template <typename T>
Tensor<T> synthesize(GanModels<T>& models, const Tensor<T>& live, const Tensor<T>& target_c, const Tensor<T>& target_m);

}  // namespace goas
