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

#include "goas/objectives.hpp"

namespace goas {
namespace {

template <typename T>
void require_models(const GanModels<T>& models) {
  if (!models.gen || !models.disc || !models.lab) throw ValidationError("GAN objective needs gen, disc and lab");
  if (models.mode == ConditioningMode::kPrototypes && !models.bank) {
    throw ValidationError("prototype conditioning needs a noise bank");
  }
}

}  // namespace

template <typename T>
Tensor<T> synthesize(GanModels<T>& models, const Tensor<T>& live, const Tensor<T>& target_c, const Tensor<T>& target_m) {
  const Tensor<T> cond = build_conditioning(models.mode, models.bank, target_c, target_m, live.dim(2));
  return models.gen->forward(live, cond);
}

template <typename T>
GeneratorObjective<T> generator_objective(GanModels<T>& models, const Tensor<T>& live, const Tensor<T>& target_c,
                                          const Tensor<T>& target_m, const LiveLossStats& live_stats,
                                          const LossWeights& weights) {
  require_models(models);
  models.gen->set_param_grads(true);
  models.disc->set_param_grads(false);
  models.lab->set_param_grads(false);

  GeneratorObjective<T> result;
  const Tensor<T> cond = build_conditioning(models.mode, models.bank, target_c, target_m, live.dim(2));
  result.synthesized = models.gen->forward(live, cond);

  const Tensor<T> probs = models.disc->forward(result.synthesized);
  const auto disc = disc_gen_loss(probs, GoDisc<T>::kRealClass);
  Tensor<T> grad = models.disc->backward(disc.grad);

  const auto vis = vis_loss(live, result.synthesized);
  const T l0 = static_cast<T>(weights.lambda0), l1 = static_cast<T>(weights.lambda1);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += l0 * vis.grad[i];

  const auto out = models.lab->forward(result.synthesized);
  const auto lab = lab_gen_loss(out, live_stats, target_c, target_m);
  const Tensor<T> lab_grad = models.lab->backward(lab.grad_c, lab.grad_m);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += l1 * lab_grad[i];

  const auto gen_grads = models.gen->backward(grad);
  backprop_conditioning(models.mode, models.bank, target_c, target_m, gen_grads.conditioning);

  models.disc->set_param_grads(true);
  models.lab->set_param_grads(true);

  result.disc_test = disc.value;
  result.vis = vis.value;
  result.lab_test = lab.value;
  result.sensor = lab.sensor;
  result.medium = lab.medium;
  result.total = combine_generator_objective(result.disc_test, result.vis, result.lab_test, weights);
  return result;
}

template <typename T>
DiscriminatorObjective<T> discriminator_objective(GanModels<T>& models, const RealBatch<T>& live,
                                                  const RealBatch<T>& spoof, const Tensor<T>& target_c,
                                                  const Tensor<T>& target_m, const LossWeights& weights) {
  require_models(models);
  models.gen->set_param_grads(false);
  models.disc->set_param_grads(true);
  models.lab->set_param_grads(true);

  DiscriminatorObjective<T> result;
  const Tensor<T> synth = synthesize(models, live.images, target_c, target_m);
  const int n_real = spoof.images.dim(0);

  // Real spoof rows first, synthesized rows after.
  const Tensor<T> probs = models.disc->forward(concat0(spoof.images, synth));
  const Tensor<T> probs_real = rows(probs, 0, n_real);
  const Tensor<T> probs_synth = rows(probs, n_real, probs.dim(0));
  const auto disc = disc_train_loss(probs_real, probs_synth, GoDisc<T>::kRealClass);
  models.disc->backward(concat0(disc.grad_real, disc.grad_synth));

  int correct = 0;
  for (int b = 0; b < probs.dim(0); ++b) {
    const bool says_real = probs.at(b, GoDisc<T>::kRealClass) >= T(0.5);
    correct += (b < n_real) == says_real;
  }
  result.disc_accuracy = static_cast<double>(correct) / probs.dim(0);

  // Classifier on live rows first, spoof rows after.
  const int n_live = live.images.dim(0);
  const auto out = models.lab->forward(concat0(live.images, spoof.images));
  const Tensor<T> sensor = concat0(live.sensor, spoof.sensor);
  const Tensor<T> medium = concat0(live.medium, spoof.medium);
  auto lab = lab_train_loss(out, sensor, medium);
  const T l1 = static_cast<T>(weights.lambda1);
  lab.grad_c *= l1;
  lab.grad_m *= l1;
  models.lab->backward(lab.grad_c, lab.grad_m);

  const auto live_c = cross_entropy(rows(out.probs_c, 0, n_live), live.sensor);
  const auto live_m = cross_entropy(rows(out.probs_m, 0, n_live), live.medium);
  result.live = {static_cast<double>(live_c.value), static_cast<double>(live_m.value)};

  models.gen->set_param_grads(true);

  result.disc_train = disc.value;
  result.lab_train = lab.value;
  result.sensor = lab.sensor;
  result.medium = lab.medium;
  result.total = combine_discriminator_objective(result.disc_train, result.lab_train, weights);
  return result;
}

#define GOAS_INSTANTIATE(T)                                                                                     \
  template Tensor<T> synthesize<T>(GanModels<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);        \
  template GeneratorObjective<T> generator_objective<T>(GanModels<T>&, const Tensor<T>&, const Tensor<T>&,      \
                                                        const Tensor<T>&, const LiveLossStats&,                 \
                                                        const LossWeights&);                                    \
  template DiscriminatorObjective<T> discriminator_objective<T>(GanModels<T>&, const RealBatch<T>&,             \
                                                                const RealBatch<T>&, const Tensor<T>&,          \
                                                                const Tensor<T>&, const LossWeights&);

GOAS_INSTANTIATE(float)
GOAS_INSTANTIATE(double)

#undef GOAS_INSTANTIATE

}  // namespace goas
