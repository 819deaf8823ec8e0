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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "goas/error.hpp"
#include "goas/training.hpp"
#include "test_support.hpp"

namespace goas {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

TrainConfig toy_config() {
  TrainConfig c;
  c.batch_size = 4;
  c.patch_size_gan = 16;
  c.patch_size_pad = 32;
  c.lr_gen = c.lr_disc = c.lr_lab = c.lr_pad = 1e-3;
  c.total_rounds = 2;
  c.golab_steps = 3;
  c.pad_steps = 2;
  c.epoch_patches = 12;
  c.seed = 5;
  return c;
}

class TrainingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    manifest_ = new DatasetManifest(testing::small_synthetic_dataset(dir_->path()));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete dir_;
  }
  const DatasetManifest& manifest() const { return *manifest_; }

  TrainConfig config = toy_config();
  ArchConfig arch = ArchConfig::toy();

 private:
  static TempDir* dir_;
  static DatasetManifest* manifest_;
};

TempDir* TrainingTest::dir_ = nullptr;
DatasetManifest* TrainingTest::manifest_ = nullptr;

std::vector<Tensor<float>> snapshot(const std::vector<nn::Parameter<float>*>& params) {
  std::vector<Tensor<float>> out;
  for (auto* p : params) out.push_back(p->value);
  return out;
}

bool same_values(const std::vector<Tensor<float>>& before, const std::vector<nn::Parameter<float>*>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(before[i] == params[i]->value)) return false;
  }
  return true;
}

void expect_same_tensors(const Checkpoint& a, const Checkpoint& b) {
  ASSERT_EQ(a.tensors.size(), b.tensors.size());
  for (const auto& [name, tensor] : a.tensors) {
    ASSERT_TRUE(b.has(name)) << name;
    EXPECT_TRUE(tensor == b.tensor(name)) << name;
  }
}

TEST(TrainConfigJson, RoundTripAndUnknownKeys) {
  TrainConfig c = toy_config();
  c.weights.lambda0 = 0.25;
  const nlohmann::json j = c;
  EXPECT_EQ(j["lambda0"], 0.25);
  const TrainConfig back = j.get<TrainConfig>();
  EXPECT_EQ(nlohmann::json(back), j);

  nlohmann::json extra = j;
  extra["learning_rate"] = 0.1;
  try {
    extra.get<TrainConfig>();
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
  }
  nlohmann::json wrong = j;
  wrong["batch_size"] = "forty";
  EXPECT_THROW(wrong.get<TrainConfig>(), SchemaError);

  TrainConfig bad = c;
  bad.lr_gen = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = c;
  bad.live_ema_decay = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(TrainConfigJson, LoadConfigWithArch) {
  TempDir dir;
  nlohmann::json j = {{"batch_size", 8}, {"arch", ArchConfig::toy()}};
  std::ofstream(dir / "c.json") << j.dump();
  const auto [config, arch] = load_config(dir / "c.json");
  EXPECT_EQ(config.batch_size, 8);
  EXPECT_EQ(nlohmann::json(arch), nlohmann::json(ArchConfig::toy()));
  std::ofstream(dir / "bad.json") << "{\"batch_size\": ";
  EXPECT_THROW(load_config(dir / "bad.json"), SchemaError);
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
}

TEST_F(TrainingTest, SamplerDrawsFromTrainSplitWithLabels) {
  const PatchSampler sampler(manifest(), 16);
  std::mt19937_64 rng(1);
  const PatchBatch live = sampler.sample_live(10, rng);
  const PatchBatch spoof = sampler.sample_spoof(10, rng);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(live.medium_onehot.at(i, 0), 1.0f);
    EXPECT_EQ(spoof.medium_onehot.at(i, 0), 0.0f);
  }
  for (const auto& r : sampler.manifest().records) EXPECT_EQ(r.split, Split::kTrain);
  EXPECT_THROW(PatchSampler(manifest(), 128), ValidationError);
}

TEST_F(TrainingTest, PhaseIsolation) {
  GanTrainer trainer(manifest(), config, arch);
  auto frozen_disc = snapshot(trainer.disc().parameters());
  auto frozen_lab = snapshot(trainer.lab().parameters());
  auto gen_before = snapshot(trainer.gen().parameters());
  trainer.gen_step();
  EXPECT_TRUE(same_values(frozen_disc, trainer.disc().parameters()));
  EXPECT_TRUE(same_values(frozen_lab, trainer.lab().parameters()));
  EXPECT_FALSE(same_values(gen_before, trainer.gen().parameters()));

  auto frozen_gen = snapshot(trainer.gen().parameters());
  auto frozen_bank = snapshot(trainer.bank()->parameters());
  trainer.disc_step();
  EXPECT_TRUE(same_values(frozen_gen, trainer.gen().parameters()));
  EXPECT_TRUE(same_values(frozen_bank, trainer.bank()->parameters()));
  EXPECT_FALSE(same_values(frozen_disc, trainer.disc().parameters()));
  EXPECT_EQ(trainer.step(), 2);
}

TEST_F(TrainingTest, OneRoundIsOneUpdatePerPhase) {
  GanTrainer trainer(manifest(), config, arch);
  std::vector<std::string> phases;
  trainer.set_metrics_sink([&](const nlohmann::json& line) { phases.push_back(line.at("phase")); });
  trainer.round();
  EXPECT_EQ(phases, (std::vector<std::string>{"gen", "disc"}));
  EXPECT_EQ(trainer.rounds_done(), 1);
}

TEST_F(TrainingTest, MetricsLogsIdenticalAcrossRuns) {
  auto run = [&] {
    std::vector<std::string> lines;
    GanTrainer trainer(manifest(), config, arch);
    trainer.set_metrics_sink([&](const nlohmann::json& line) { lines.push_back(line.dump()); });
    for (int r = 0; r < 3; ++r) trainer.round();
    return lines;
  };
  const auto a = run();
  EXPECT_EQ(a, run());
  std::int64_t last = 0;
  for (const auto& line : a) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_GT(j.at("step").get<std::int64_t>(), last);
    last = j.at("step");
    for (const auto& item : j.items()) {
      if (item.value().is_number_float()) EXPECT_TRUE(std::isfinite(item.value().get<double>())) << item.key();
    }
  }
}

TEST_F(TrainingTest, CheckpointResumeIsBitIdentical) {
  TempDir dir;
  GanTrainer straight(manifest(), config, arch);
  for (int r = 0; r < 4; ++r) straight.round();

  GanTrainer first(manifest(), config, arch);
  for (int r = 0; r < 2; ++r) first.round();
  save_checkpoint(first.checkpoint(), dir / "mid.ckpt");
  GanTrainer resumed(manifest(), load_checkpoint(dir / "mid.ckpt"));
  EXPECT_EQ(resumed.rounds_done(), 2);
  for (int r = 0; r < 2; ++r) resumed.round();

  const Checkpoint a = straight.checkpoint(), b = resumed.checkpoint();
  expect_same_tensors(a, b);
  EXPECT_EQ(a.header, b.header);
}

TEST_F(TrainingTest, CheckpointFileRoundTrip) {
  TempDir dir;
  GanTrainer trainer(manifest(), config, arch);
  trainer.round();
  const Checkpoint c = trainer.checkpoint();
  save_checkpoint(c, dir / "a.ckpt");
  const Checkpoint back = load_checkpoint(dir / "a.ckpt");
  EXPECT_EQ(back.header, c.header);
  expect_same_tensors(c, back);

  std::ofstream(dir / "junk.ckpt") << "not a checkpoint at all";
  EXPECT_THROW(load_checkpoint(dir / "junk.ckpt"), SchemaError);
  EXPECT_THROW(load_checkpoint(dir / "none.ckpt"), IoError);
  EXPECT_THROW(load_gopad(c), ValidationError);
  EXPECT_NO_THROW(load_golab(c));
}

TEST_F(TrainingTest, OneHotModeHasNoBank) {
  TempDir dir;
  const Checkpoint c = ablation_onehot_maps(manifest(), config, arch, dir.path());
  EXPECT_FALSE(has_parameters(c, "bank"));
  const GeneratorBundle g = load_generator(c);
  EXPECT_EQ(g.mode, ConditioningMode::kOneHotMaps);
  EXPECT_EQ(g.bank, nullptr);
  GanTrainer trainer(manifest(), config, arch, ConditioningMode::kOneHotMaps);
  EXPECT_EQ(trainer.bank(), nullptr);
}

TEST_F(TrainingTest, AlternatingTrainWritesRunFiles) {
  TempDir dir;
  const Checkpoint c = alternating_train(manifest(), config, arch, dir / "run");
  EXPECT_TRUE(fs::exists(dir / "run" / "final.ckpt"));
  std::ifstream in(dir / "run" / "metrics.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 2 * config.total_rounds);
  EXPECT_EQ(c.header.at("kind"), "gan");
}

TEST_F(TrainingTest, DivergenceSavesDiagnosticCheckpoint) {
  TempDir dir;
  config.lr_gen = config.lr_disc = 1e30;
  config.total_rounds = 5;
  EXPECT_THROW(alternating_train(manifest(), config, arch, dir / "run"), DivergenceError);
  EXPECT_TRUE(fs::exists(dir / "run" / "diverged.ckpt"));
  EXPECT_FALSE(fs::exists(dir / "run" / "final.ckpt"));
}

TEST_F(TrainingTest, AugmentationPoolLabelsAndRejections) {
  const Checkpoint c = alternating_train(manifest(), config, arch, {});
  const PatchSampler sampler(manifest(), config.patch_size_gan);
  std::mt19937_64 rng(3);
  const PatchBatch live = sampler.sample_live(5, rng);

  const PatchBatch pool = synthesize_augmentation_pool(c, live, {{1, 1}}, 12);
  ASSERT_EQ(pool.size(), 12);
  for (int i = 0; i < 12; ++i) {
    EXPECT_EQ(pool.sensor_onehot.at(i, 1), 1.0f);
    EXPECT_EQ(pool.medium_onehot.at(i, 1), 1.0f);
    EXPECT_EQ(pool.sensor_onehot.at(i, 0), 0.0f);
  }
  for (float v : pool.images.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_EQ(synthesize_augmentation_pool(c, live, {}, 12).size(), 0);
  EXPECT_THROW(synthesize_augmentation_pool(c, live, {{0, 0}}, 4), ValidationError);
  EXPECT_THROW(synthesize_augmentation_pool(c, live, {{2, 1}}, 4), ValidationError);
  EXPECT_THROW(synthesize_augmentation_pool(c, sampler.sample_spoof(2, rng), {{0, 1}}, 4), ValidationError);
}

TEST_F(TrainingTest, UnseenCombinationStillSynthesizes) {
  TempDir dir;
  SyntheticLayout layout;
  layout.videos_per_combo = 2;
  layout.frames = 1;
  layout.combos = {{0, 0}, {1, 0}, {0, 1}, {0, 2}, {1, 2}};
  const DatasetManifest partial =
      generate_synthetic_dataset(make_noise_spec(2, 3, 64, 0.08, 4), layout, dir.path());
  config.total_rounds = 1;
  const Checkpoint c = alternating_train(partial, config, arch, {});
  const PatchSampler sampler(partial, config.patch_size_gan);
  std::mt19937_64 rng(3);
  const PatchBatch pool = synthesize_augmentation_pool(c, sampler.sample_live(2, rng), {{1, 1}}, 3);
  EXPECT_EQ(pool.size(), 3);
}

TEST_F(TrainingTest, EpochSizeFollowsRatio) {
  config.epoch_patches = 1000;
  const PatchSampler sampler(manifest(), config.patch_size_gan);
  std::mt19937_64 rng(2);
  PatchBatch pool = sampler.sample_spoof(4, rng);
  config.augment_ratio = 0.1;
  EXPECT_EQ(GolabTrainer(manifest(), config, arch, pool).epoch_size(), 1100);
  EXPECT_EQ(GolabTrainer(manifest(), config, arch).epoch_size(), 1000);
  config.augment_ratio = 0.0;
  EXPECT_EQ(GolabTrainer(manifest(), config, arch, pool).epoch_size(), 1000);
}

TEST_F(TrainingTest, ZeroRatioMatchesPlainTraining) {
  config.augment_ratio = 0.0;
  const PatchSampler sampler(manifest(), config.patch_size_gan);
  std::mt19937_64 rng(2);
  const Checkpoint plain = train_golab_standalone(manifest(), config, arch, {});
  const Checkpoint zero = train_golab_standalone(manifest(), config, arch, {}, sampler.sample_spoof(4, rng));
  expect_same_tensors(plain, zero);
}

TEST_F(TrainingTest, GolabStepsAreDeterministic) {
  const Checkpoint a = train_golab_standalone(manifest(), config, arch, {});
  const Checkpoint b = train_golab_standalone(manifest(), config, arch, {});
  expect_same_tensors(a, b);
  EXPECT_EQ(a.header.at("kind"), "golab");
  EXPECT_NO_THROW(load_golab(a));
  EXPECT_THROW(load_generator(a), ValidationError);
}

TEST_F(TrainingTest, GopadFirstLossIsQuarter) {
  arch.pad_map_size = 4;
  arch.pad_zero_head = true;
  GopadTrainer trainer(manifest(), config, arch);
  const GanStepStats first = trainer.step();
  EXPECT_NEAR(first.total, 0.25, 1e-6);
  EXPECT_EQ(first.phase, "pad");
  const Checkpoint c = trainer.checkpoint();
  EXPECT_EQ(c.header.at("kind"), "gopad");
  EXPECT_NO_THROW(load_gopad(c));
  config.patch_size_pad = 128;
  EXPECT_THROW(GopadTrainer(manifest(), config, arch), ValidationError);
}

}  // namespace
}  // namespace goas
