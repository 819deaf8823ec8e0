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

#include <string>
#include <vector>

#include "goas/losses.hpp"
#include "goas/networks.hpp"
#include "goas/noise_bank.hpp"
#include "goas/objectives.hpp"
#include "test_support.hpp"

namespace goas::testing {

struct GradientCase {
  std::string name;
  GradCheck check;
};

// Toy-sized double-precision models for the adversarial objectives.
struct ToyGan {
  static constexpr int kSize = 8;
  int n_c = 3;
  int n_m = 3;
  ArchConfig arch = ArchConfig::toy();
  GoGen<double> gen{arch, 2, 101};
  GoDisc<double> disc{arch, kSize, 102};
  GoLab<double> lab{arch, 3, 3, 103};
  NoisePrototypeBank<double> bank = init_bank<double>(3, 3, kSize, BankInit::kGaussian, 104, 0.05);

  GanModels<double> models() { return {&gen, &disc, &lab, &bank, ConditioningMode::kPrototypes}; }
  std::vector<nn::Parameter<double>*> gen_side() {
    auto params = gen.parameters();
    for (auto* p : bank.parameters()) params.push_back(p);
    return params;
  }
  std::vector<nn::Parameter<double>*> disc_side() {
    auto params = disc.parameters();
    for (auto* p : lab.parameters()) params.push_back(p);
    return params;
  }
  void zero_all() {
    for (auto* p : gen_side()) p->grad.zero();
    for (auto* p : disc_side()) p->grad.zero();
  }
};

struct ToyBatches {
  Tensor<double> live, target_c, target_m;
  RealBatch<double> live_batch, spoof_batch;
};

inline ToyBatches toy_batches(int batch = 2) {
  ToyBatches b;
  const int s = ToyGan::kSize;
  b.live = random_tensor<double>({batch, 3, s, s}, 201, 0.3, 0.7);
  std::vector<int> sensors, mediums, live_mediums(batch, 0), spoof_mediums;
  for (int i = 0; i < batch; ++i) {
    sensors.push_back(i % 3);
    mediums.push_back(1 + i % 2);
    spoof_mediums.push_back(2 - i % 2);
  }
  b.target_c = onehot_rows<double>(sensors, 3);
  b.target_m = onehot_rows<double>(mediums, 3);
  b.live_batch = {b.live, onehot_rows<double>(sensors, 3), onehot_rows<double>(live_mediums, 3)};
  b.spoof_batch = {random_tensor<double>({batch, 3, s, s}, 202, 0.1, 0.9), onehot_rows<double>(sensors, 3),
                   onehot_rows<double>(spoof_mediums, 3)};
  return b;
}

inline GradCheck merge(GradCheck a, const GradCheck& b) {
  a.max_rel_error = std::max(a.max_rel_error, b.max_rel_error);
  a.max_abs_analytic = std::max(a.max_abs_analytic, b.max_abs_analytic);
  a.checked += b.checked;
  return a;
}

// Snapshots every analytic gradient first: the objectives accumulate into
// Parameter::grad on each evaluation.
inline GradCheck check_groups(const std::vector<nn::Parameter<double>*>& params, const std::function<double()>& loss,
                              int entries_per_group) {
  std::vector<Tensor<double>> analytic;
  for (auto* p : params) analytic.push_back(p->grad);
  GradCheck all;
  for (std::size_t i = 0; i < params.size(); ++i) {
    all = merge(all, finite_difference_check<double>(params[i]->value.values(), analytic[i].values(), loss,
                                                     entries_per_group));
  }
  return all;
}

// Central-difference check of every loss with respect to its input and of
// both composite objectives with respect to every trainable group.
inline std::vector<GradientCase> run_gradient_suite(int entries_per_group = 10) {
  std::vector<GradientCase> cases;

  {
    const Tensor<double> image = random_tensor<double>({2, 3, 4, 4}, 1, 0, 1);
    Tensor<double> synth = random_tensor<double>({2, 3, 4, 4}, 2, 0, 1);
    const auto g = vis_loss(image, synth).grad;
    cases.push_back({"J_vis", finite_difference_check<double>(synth.values(), g.values(),
                                                              [&] { return vis_loss(image, synth).value; })});
  }
  {
    Tensor<double> real = random_probs(3, 2, 3), synth = random_probs(3, 2, 4);
    const auto r = disc_train_loss(real, synth);
    auto f = [&] { return disc_train_loss(real, synth).value; };
    cases.push_back({"J_disc_train", merge(finite_difference_check<double>(real.values(), r.grad_real.values(), f),
                                           finite_difference_check<double>(synth.values(), r.grad_synth.values(), f))});
  }
  {
    Tensor<double> synth = random_probs(3, 2, 5);
    const auto g = disc_gen_loss(synth).grad;
    cases.push_back({"J_disc_test", finite_difference_check<double>(synth.values(), g.values(),
                                                                    [&] { return disc_gen_loss(synth).value; })});
  }
  const Tensor<double> tc = onehot_rows<double>({0, 2, 1}, 3), tm = onehot_rows<double>({1, 0, 3}, 4);
  {
    Tensor<double> p = random_probs(3, 3, 6);
    const auto g = cross_entropy(p, tc).grad;
    cases.push_back({"S_c", finite_difference_check<double>(p.values(), g.values(),
                                                            [&] { return cross_entropy(p, tc).value; })});
  }
  {
    Tensor<double> p = random_probs(3, 4, 7);
    const auto g = cross_entropy(p, tm).grad;
    cases.push_back({"S_m", finite_difference_check<double>(p.values(), g.values(),
                                                            [&] { return cross_entropy(p, tm).value; })});
  }
  {
    LabOutput<double> out;
    out.probs_c = random_probs(3, 3, 8);
    out.probs_m = random_probs(3, 4, 9);
    const auto r = lab_train_loss(out, tc, tm);
    auto f = [&] { return lab_train_loss(out, tc, tm).value; };
    cases.push_back({"J_lab_train", merge(finite_difference_check<double>(out.probs_c.values(), r.grad_c.values(), f),
                                          finite_difference_check<double>(out.probs_m.values(), r.grad_m.values(), f))});
    const LiveLossStats live{0.4, 1.3};
    const auto q = lab_gen_loss(out, live, tc, tm);
    auto h = [&] { return lab_gen_loss(out, live, tc, tm).value; };
    cases.push_back({"J_lab_test", merge(finite_difference_check<double>(out.probs_c.values(), q.grad_c.values(), h),
                                         finite_difference_check<double>(out.probs_m.values(), q.grad_m.values(), h))});
  }
  {
    Tensor<double> map = random_tensor<double>({2, 3, 3}, 10, 0, 1);
    const Tensor<double> gt = ground_truth_pad_map<double>({false, true}, 3, 3);
    const auto g = pad_loss(map, gt).grad;
    cases.push_back({"J_pad", finite_difference_check<double>(map.values(), g.values(),
                                                              [&] { return pad_loss(map, gt).value; })});
  }

  const LossWeights weights;
  const LiveLossStats live_stats{0.6, 0.9};
  {
    ToyGan gan;
    ToyBatches b = toy_batches();
    GanModels<double> m = gan.models();
    auto f = [&] { return generator_objective(m, b.live, b.target_c, b.target_m, live_stats, weights).total; };
    gan.zero_all();
    generator_objective(m, b.live, b.target_c, b.target_m, live_stats, weights);
    cases.push_back({"generator_objective", check_groups(gan.gen_side(), f, entries_per_group)});
  }
  {
    ToyGan gan;
    ToyBatches b = toy_batches();
    GanModels<double> m = gan.models();
    auto f = [&] {
      return discriminator_objective(m, b.live_batch, b.spoof_batch, b.target_c, b.target_m, weights).total;
    };
    gan.zero_all();
    discriminator_objective(m, b.live_batch, b.spoof_batch, b.target_c, b.target_m, weights);
    cases.push_back({"discriminator_objective", check_groups(gan.disc_side(), f, entries_per_group)});
  }
  return cases;
}

inline double abs_grad_sum(const std::vector<nn::Parameter<double>*>& params) {
  double total = 0.0;
  for (auto* p : params) {
    for (double g : p->grad.values()) total += std::abs(g);
  }
  return total;
}

}  // namespace goas::testing
