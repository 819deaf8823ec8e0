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
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "goas/checkpoint.hpp"
#include "goas/dataset.hpp"
#include "goas/losses.hpp"
#include "goas/networks.hpp"
#include "goas/nn/adam.hpp"
#include "goas/noise_bank.hpp"
#include "goas/objectives.hpp"

namespace goas {

struct TrainConfig {
  int batch_size = 40;
  int patch_size_gan = 64;
  int patch_size_pad = 256;
  double lr_gen = 1e-4;
  double lr_disc = 1e-4;  // discriminator and classifier in the GAN phase
  double lr_lab = 1e-4;   // standalone classifier training
  double lr_pad = 1e-4;
  int steps_per_phase = 1;
  int total_rounds = 1000;
  int golab_steps = 2000;
  int pad_steps = 500;
  int epoch_patches = 1000;     // real patches per standalone classifier epoch
  double augment_ratio = 0.1;   // synthetic patches per real patch in an epoch
  LossWeights weights;
  std::uint64_t seed = 0;
  std::string bank_init = "gaussian";
  double bank_stddev = 0.01;
  double bank_weight_decay = 0.0;
  double live_ema_decay = 0.9;
  double clip_grad_norm = 0.0;  // 0 disables clipping
  int checkpoint_every = 0;     // rounds (GAN) or steps (classifiers); 0 = final only

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
// Flat keys mirroring the fields; lambda0 / lambda1 carry the loss weights.
// Unknown keys are rejected.
void from_json(const nlohmann::json& j, TrainConfig& c);

// Reads a config file holding TrainConfig keys and an optional "arch" object.
std::pair<TrainConfig, ArchConfig> load_config(const std::filesystem::path& path);

// Draws labelled crops from the train split held in memory.
class PatchSampler {
 public:
  PatchSampler(const DatasetManifest& manifest, int patch_size);

  // Uniform over records of the pool, then frame, then corner.
  PatchBatch sample_live(int count, std::mt19937_64& rng) const { return sample(live_, count, rng); }
  PatchBatch sample_spoof(int count, std::mt19937_64& rng) const { return sample(spoof_, count, rng); }
  PatchBatch sample_any(int count, std::mt19937_64& rng) const { return sample(all_, count, rng); }

  std::size_t live_videos() const { return live_.size(); }
  std::size_t spoof_videos() const { return spoof_.size(); }
  const DatasetManifest& manifest() const { return manifest_; }

 private:
  PatchBatch sample(const std::vector<int>& pool, int count, std::mt19937_64& rng) const;

  DatasetManifest manifest_;
  FrameStore store_;
  int patch_size_;
  std::vector<int> live_, spoof_, all_;
};

// One metrics line: {"step":n,"phase":"gen|disc|lab|pad", loss components...}.
using MetricsSink = std::function<void(const nlohmann::json&)>;

struct GanStepStats {
  std::int64_t step = 0;
  std::string phase;
  double total = 0.0;
  double vis = 0.0;   // gen phase only
  double disc = 0.0;  // J_Disc_test (gen) or J_Disc_train (disc)
  double lab = 0.0;   // J_Lab_test (gen) or J_Lab_train (disc)
  double sensor = 0.0;
  double medium = 0.0;
  double disc_accuracy = 0.0;  // disc phase only
};

// Alternating adversarial training of GOGen (+ prototype bank) against
// GODisc and GOLab.
class GanTrainer {
 public:
  GanTrainer(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
             ConditioningMode mode = ConditioningMode::kPrototypes);
  // Rebuilds the full training state from a checkpoint written by checkpoint().
  GanTrainer(const DatasetManifest& manifest, const Checkpoint& checkpoint);

  GanStepStats gen_step();
  GanStepStats disc_step();
  // steps_per_phase generator steps followed by steps_per_phase discriminator steps.
  void round();

  Checkpoint checkpoint() const;
  void set_metrics_sink(MetricsSink sink) { sink_ = std::move(sink); }

  std::int64_t step() const { return step_; }
  std::int64_t rounds_done() const { return rounds_; }
  const TrainConfig& config() const { return config_; }
  const ArchConfig& arch() const { return arch_; }
  ConditioningMode mode() const { return mode_; }
  const LiveLossStats& live_stats() const { return live_; }
  GanModels<float> models();
  GoGen<float>& gen() { return *gen_; }
  GoDisc<float>& disc() { return *disc_; }
  GoLab<float>& lab() { return *lab_; }
  NoisePrototypeBank<float>* bank() { return bank_.get(); }
  const PatchSampler& sampler() const { return sampler_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  void build();
  // Per-sample target one-hots: sensors uniform, mediums uniform over spoof mediums.
  std::pair<Tensor<float>, Tensor<float>> draw_targets(int count);
  void emit(const GanStepStats& stats);
  void check_finite(double loss, const char* phase);

  TrainConfig config_;
  ArchConfig arch_;
  ConditioningMode mode_;
  int n_c_, n_m_;
  PatchSampler sampler_;
  std::unique_ptr<GoGen<float>> gen_;
  std::unique_ptr<GoDisc<float>> disc_;
  std::unique_ptr<GoLab<float>> lab_;
  std::unique_ptr<NoisePrototypeBank<float>> bank_;
  nn::Adam<float> opt_gen_, opt_disc_;
  LiveLossStats live_;
  bool live_initialized_ = false;
  std::int64_t step_ = 0;
  std::int64_t rounds_ = 0;
  std::mt19937_64 rng_;
  MetricsSink sink_;
};

// Supervised GOLab training on real patches, optionally mixed with a pool of
// labelled synthetic patches.
class GolabTrainer {
 public:
  GolabTrainer(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
               std::optional<PatchBatch> augmentation = std::nullopt);

  GanStepStats step();
  Checkpoint checkpoint() const;
  void set_metrics_sink(MetricsSink sink) { sink_ = std::move(sink); }

  // Patches in one epoch: real count plus round(ratio * real count) synthetic.
  int epoch_size() const;
  std::int64_t steps_done() const { return step_; }
  GoLab<float>& lab() { return *lab_; }
  const ArchConfig& arch() const { return arch_; }

 private:
  void start_epoch();

  TrainConfig config_;
  ArchConfig arch_;
  int n_c_, n_m_;
  PatchSampler sampler_;
  std::optional<PatchBatch> augmentation_;
  std::unique_ptr<GoLab<float>> lab_;
  nn::Adam<float> opt_;
  PatchBatch epoch_;
  std::vector<int> order_;
  std::size_t cursor_ = 0;
  std::int64_t step_ = 0;
  std::mt19937_64 rng_;
  MetricsSink sink_;
};

class GopadTrainer {
 public:
  GopadTrainer(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch);

  GanStepStats step();
  Checkpoint checkpoint() const;
  void set_metrics_sink(MetricsSink sink) { sink_ = std::move(sink); }

  std::int64_t steps_done() const { return step_; }
  GoPad<float>& pad() { return *pad_; }

 private:
  TrainConfig config_;
  ArchConfig arch_;
  int n_c_, n_m_;
  PatchSampler sampler_;
  std::unique_ptr<GoPad<float>> pad_;
  nn::Adam<float> opt_;
  std::int64_t step_ = 0;
  std::mt19937_64 rng_;
  MetricsSink sink_;
};

// Run drivers. With a non-empty out_dir they write metrics.jsonl, periodic
// checkpoints and final.ckpt there; a non-finite loss saves diverged.ckpt
// and throws DivergenceError.
Checkpoint alternating_train(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                             const std::filesystem::path& out_dir,
                             ConditioningMode mode = ConditioningMode::kPrototypes);
// Same pipeline with constant one-hot class maps instead of learned prototypes.
Checkpoint ablation_onehot_maps(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                                const std::filesystem::path& out_dir);
Checkpoint train_golab_standalone(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                                  const std::filesystem::path& out_dir,
                                  std::optional<PatchBatch> augmentation = std::nullopt);
Checkpoint train_gopad(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                       const std::filesystem::path& out_dir);

// Networks restored from a checkpoint for inference.
ArchConfig checkpoint_arch(const Checkpoint& checkpoint);
std::unique_ptr<GoLab<float>> load_golab(const Checkpoint& checkpoint);
std::unique_ptr<GoPad<float>> load_gopad(const Checkpoint& checkpoint);

struct GeneratorBundle {
  std::unique_ptr<GoGen<float>> gen;
  std::unique_ptr<NoisePrototypeBank<float>> bank;  // null in one-hot-map mode
  ConditioningMode mode = ConditioningMode::kPrototypes;
  int num_sensors = 0;
  int num_mediums = 0;
  int patch_size = 0;
};
GeneratorBundle load_generator(const Checkpoint& checkpoint);

// Runs the generator on live patches (cycled as needed) for each target
// combination in turn, `count` patches in total, labelled with the target ids.
PatchBatch synthesize_augmentation_pool(const Checkpoint& checkpoint, const PatchBatch& live_patches,
                                        const std::vector<std::pair<int, int>>& combos, int count);

}  // namespace goas
