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

#include "goas/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "goas/error.hpp"
#include "goas/log.hpp"

namespace goas {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

void TrainConfig::validate() const {
  if (batch_size < 1 || patch_size_gan < 1 || patch_size_pad < 1) {
    throw ValidationError("batch and patch sizes must be positive");
  }
  if (!(lr_gen > 0) || !(lr_disc > 0) || !(lr_lab > 0) || !(lr_pad > 0)) {
    throw ValidationError("learning rates must be positive");
  }
  if (steps_per_phase < 1 || total_rounds < 1 || golab_steps < 1 || pad_steps < 1 || epoch_patches < 1) {
    throw ValidationError("step and round counts must be positive");
  }
  if (!(augment_ratio >= 0)) throw ValidationError("augment_ratio must be nonnegative");
  weights.validate();
  parse_bank_init(bank_init);
  if (!(bank_stddev >= 0) || !(bank_weight_decay >= 0)) throw ValidationError("bank settings must be nonnegative");
  if (!(live_ema_decay >= 0 && live_ema_decay < 1)) throw ValidationError("live_ema_decay must lie in [0, 1)");
  if (!(clip_grad_norm >= 0)) throw ValidationError("clip_grad_norm must be nonnegative");
  if (checkpoint_every < 0) throw ValidationError("checkpoint_every must be nonnegative");
}

void to_json(json& j, const TrainConfig& c) {
  j = {{"batch_size", c.batch_size},
       {"patch_size_gan", c.patch_size_gan},
       {"patch_size_pad", c.patch_size_pad},
       {"lr_gen", c.lr_gen},
       {"lr_disc", c.lr_disc},
       {"lr_lab", c.lr_lab},
       {"lr_pad", c.lr_pad},
       {"steps_per_phase", c.steps_per_phase},
       {"total_rounds", c.total_rounds},
       {"golab_steps", c.golab_steps},
       {"pad_steps", c.pad_steps},
       {"epoch_patches", c.epoch_patches},
       {"augment_ratio", c.augment_ratio},
       {"lambda0", c.weights.lambda0},
       {"lambda1", c.weights.lambda1},
       {"seed", c.seed},
       {"bank_init", c.bank_init},
       {"bank_stddev", c.bank_stddev},
       {"bank_weight_decay", c.bank_weight_decay},
       {"live_ema_decay", c.live_ema_decay},
       {"clip_grad_norm", c.clip_grad_norm},
       {"checkpoint_every", c.checkpoint_every}};
}

void from_json(const json& j, TrainConfig& c) {
  if (!j.is_object()) throw SchemaError("training config must be a JSON object");
  json known;
  to_json(known, TrainConfig{});
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw SchemaError("unknown training config key '" + item.key() + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception&) {
      throw SchemaError(std::string("training config key '") + key + "' has the wrong type");
    }
  };
  get("batch_size", c.batch_size);
  get("patch_size_gan", c.patch_size_gan);
  get("patch_size_pad", c.patch_size_pad);
  get("lr_gen", c.lr_gen);
  get("lr_disc", c.lr_disc);
  get("lr_lab", c.lr_lab);
  get("lr_pad", c.lr_pad);
  get("steps_per_phase", c.steps_per_phase);
  get("total_rounds", c.total_rounds);
  get("golab_steps", c.golab_steps);
  get("pad_steps", c.pad_steps);
  get("epoch_patches", c.epoch_patches);
  get("augment_ratio", c.augment_ratio);
  get("lambda0", c.weights.lambda0);
  get("lambda1", c.weights.lambda1);
  get("seed", c.seed);
  get("bank_init", c.bank_init);
  get("bank_stddev", c.bank_stddev);
  get("bank_weight_decay", c.bank_weight_decay);
  get("live_ema_decay", c.live_ema_decay);
  get("clip_grad_norm", c.clip_grad_norm);
  get("checkpoint_every", c.checkpoint_every);
}

std::pair<TrainConfig, ArchConfig> load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw SchemaError("config " + path.string() + " must be a JSON object");
  ArchConfig arch;
  if (j.contains("arch")) {
    arch = j.at("arch").get<ArchConfig>();
    j.erase("arch");
  }
  TrainConfig config = j.get<TrainConfig>();
  config.validate();
  arch.validate();
  return {config, arch};
}

// ---------------------------------------------------------------- sampling

PatchSampler::PatchSampler(const DatasetManifest& manifest, int patch_size)
    : manifest_(select_split(manifest, Split::kTrain)), store_(manifest_), patch_size_(patch_size) {
  for (int i = 0; i < static_cast<int>(manifest_.records.size()); ++i) {
    const auto& r = manifest_.records[i];
    for (const auto& frame : store_.frames(r.id)) {
      if (frame.height < patch_size || frame.width < patch_size) {
        throw ValidationError("record '" + r.id + "' has " + std::to_string(frame.height) + "x" +
                              std::to_string(frame.width) + " frames, smaller than patch size " +
                              std::to_string(patch_size));
      }
    }
    (r.is_live() ? live_ : spoof_).push_back(i);
    all_.push_back(i);
  }
}

PatchBatch PatchSampler::sample(const std::vector<int>& pool, int count, std::mt19937_64& rng) const {
  if (pool.empty()) throw ValidationError("no training videos available for sampling");
  PatchBatch batch = make_patch_batch(count, patch_size_, manifest_.n_c, manifest_.n_m);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int i = 0; i < count; ++i) {
    const VideoRecord& r = manifest_.records[pool[pick(rng)]];
    const auto& frames = store_.frames(r.id);
    const RgbImage& frame = frames[std::uniform_int_distribution<std::size_t>(0, frames.size() - 1)(rng)];
    const int top = std::uniform_int_distribution<int>(0, frame.height - patch_size_)(rng);
    const int left = std::uniform_int_distribution<int>(0, frame.width - patch_size_)(rng);
    put_patch(batch, i, frame, top, left, r.sensor_id, r.medium_id, r.id);
  }
  return batch;
}

// ---------------------------------------------------------------- helpers

namespace {

std::string rng_state(const std::mt19937_64& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

void restore_rng(std::mt19937_64& rng, const std::string& state) {
  std::istringstream in(state);
  in >> rng;
  if (!in) throw SchemaError("checkpoint holds a malformed RNG state");
}

json base_header(const char* kind, const TrainConfig& config, const ArchConfig& arch, int n_c, int n_m,
                 std::int64_t step, const std::mt19937_64& rng) {
  return {{"kind", kind}, {"train", config}, {"arch", arch}, {"n_c", n_c},
          {"n_m", n_m},   {"step", step},    {"rng", rng_state(rng)}};
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw DivergenceError(std::string("non-finite ") + what + " loss");
}

void require_finite(Network<float>& net, const char* what) {
  if (!net.all_finite()) throw DivergenceError(std::string(what) + " parameters became non-finite");
}

nn::AdamOptions adam(double lr) {
  nn::AdamOptions o;
  o.lr = lr;
  return o;
}

// Metrics file plus periodic and final checkpoints for one run directory.
class RunWriter {
 public:
  explicit RunWriter(const fs::path& dir) : dir_(dir) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    metrics_.open(dir_ / "metrics.jsonl", std::ios::trunc);
    if (!metrics_) throw IoError("cannot write " + (dir_ / "metrics.jsonl").string());
  }

  MetricsSink sink() {
    return [this](const json& line) {
      if (metrics_.is_open()) metrics_ << line.dump() << '\n';
    };
  }

  void save(const Checkpoint& checkpoint, const std::string& name) {
    if (dir_.empty()) return;
    metrics_.flush();
    save_checkpoint(checkpoint, dir_ / name);
  }

  bool active() const { return !dir_.empty(); }

 private:
  fs::path dir_;
  std::ofstream metrics_;
};

template <typename Trainer, typename Step>
Checkpoint run_with_divergence_guard(Trainer& trainer, RunWriter& writer, Step&& step) {
  try {
    step();
  } catch (const DivergenceError&) {
    writer.save(trainer.checkpoint(), "diverged.ckpt");
    throw;
  }
  Checkpoint final_checkpoint = trainer.checkpoint();
  writer.save(final_checkpoint, "final.ckpt");
  return final_checkpoint;
}

}  // namespace

// ---------------------------------------------------------------- GAN

GanTrainer::GanTrainer(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                       ConditioningMode mode)
    : config_(config),
      arch_(arch),
      mode_(mode),
      n_c_(manifest.n_c),
      n_m_(manifest.n_m),
      sampler_(manifest, config.patch_size_gan),
      rng_(config.seed) {
  config_.validate();
  arch_.validate();
  if (sampler_.live_videos() == 0) throw ValidationError("GAN training needs live training videos");
  if (sampler_.spoof_videos() == 0) throw ValidationError("GAN training needs spoof training videos");
  if (n_m_ < 2) throw ValidationError("GAN training needs at least one spoof medium");
  build();
}

GanTrainer::GanTrainer(const DatasetManifest& manifest, const Checkpoint& checkpoint)
    : GanTrainer(manifest, checkpoint.header.at("train").get<TrainConfig>(),
                 checkpoint.header.at("arch").get<ArchConfig>(),
                 parse_conditioning_mode(checkpoint.header.at("mode").get<std::string>())) {
  const auto& h = checkpoint.header;
  if (h.at("kind").get<std::string>() != "gan") throw SchemaError("checkpoint is not a GAN training checkpoint");
  if (h.at("n_c").get<int>() != n_c_ || h.at("n_m").get<int>() != n_m_) {
    throw SchemaError("checkpoint class counts do not match the manifest");
  }
  import_parameters(checkpoint, "gen", gen_->parameters());
  import_parameters(checkpoint, "disc", disc_->parameters());
  import_parameters(checkpoint, "lab", lab_->parameters());
  if (bank_) import_parameters(checkpoint, "bank", bank_->parameters());
  import_optimizer(checkpoint, "opt.gen", opt_gen_);
  import_optimizer(checkpoint, "opt.disc", opt_disc_);
  step_ = h.at("step").get<std::int64_t>();
  rounds_ = h.at("rounds").get<std::int64_t>();
  live_.sensor = h.at("live").at("sensor").get<double>();
  live_.medium = h.at("live").at("medium").get<double>();
  live_initialized_ = h.at("live").at("initialized").get<bool>();
  restore_rng(rng_, h.at("rng").get<std::string>());
}

void GanTrainer::build() {
  const std::uint64_t seed = config_.seed;
  const int k = conditioning_channels(mode_, n_c_, n_m_);
  gen_ = std::make_unique<GoGen<float>>(arch_, k, seed + 1);
  disc_ = std::make_unique<GoDisc<float>>(arch_, config_.patch_size_gan, seed + 2);
  lab_ = std::make_unique<GoLab<float>>(arch_, n_c_, n_m_, seed + 3);
  std::vector<nn::Parameter<float>*> gen_params = gen_->parameters();
  if (mode_ == ConditioningMode::kPrototypes) {
    bank_ = std::make_unique<NoisePrototypeBank<float>>(init_bank<float>(
        n_c_, n_m_, config_.patch_size_gan, parse_bank_init(config_.bank_init), seed + 4, config_.bank_stddev));
    for (auto* p : bank_->parameters()) gen_params.push_back(p);
  }
  opt_gen_ = nn::Adam<float>(gen_params, adam(config_.lr_gen));
  for (std::size_t i = 0; i < gen_params.size(); ++i) {
    opt_gen_.set_weight_decay(i, i < gen_->parameters().size() ? 0.0 : config_.bank_weight_decay);
  }
  std::vector<nn::Parameter<float>*> disc_params = disc_->parameters();
  for (auto* p : lab_->parameters()) disc_params.push_back(p);
  opt_disc_ = nn::Adam<float>(disc_params, adam(config_.lr_disc));
}

GanModels<float> GanTrainer::models() {
  return {gen_.get(), disc_.get(), lab_.get(), bank_.get(), mode_};
}

std::pair<Tensor<float>, Tensor<float>> GanTrainer::draw_targets(int count) {
  Tensor<float> c({count, n_c_}), m({count, n_m_});
  std::uniform_int_distribution<int> sensor(0, n_c_ - 1), medium(1, n_m_ - 1);
  for (int b = 0; b < count; ++b) {
    c.at(b, sensor(rng_)) = 1.0f;
    m.at(b, medium(rng_)) = 1.0f;
  }
  return {std::move(c), std::move(m)};
}

void GanTrainer::emit(const GanStepStats& s) {
  if (!sink_) return;
  json line = {{"step", s.step}, {"phase", s.phase}};
  if (s.phase == "gen") line["J_vis"] = s.vis;
  line["J_disc"] = s.disc;
  line["S_c"] = s.sensor;
  line["S_m"] = s.medium;
  line["J_lab"] = s.lab;
  line["J_total"] = s.total;
  if (s.phase == "disc") line["disc_acc"] = s.disc_accuracy;
  sink_(line);
}

GanStepStats GanTrainer::gen_step() {
  const PatchBatch live = sampler_.sample_live(config_.batch_size, rng_);
  const auto [target_c, target_m] = draw_targets(config_.batch_size);
  opt_gen_.zero_grad();
  GanModels<float> m = models();
  const auto r = generator_objective(m, live.images, target_c, target_m, live_, config_.weights);
  require_finite(r.total, "generator");
  if (config_.clip_grad_norm > 0) opt_gen_.clip_grad_norm(config_.clip_grad_norm);
  opt_gen_.step();
  require_finite(*gen_, "generator");
  if (bank_ && !bank_->all_finite()) throw DivergenceError("prototype bank became non-finite");

  GanStepStats s;
  s.step = ++step_;
  s.phase = "gen";
  s.total = r.total;
  s.vis = r.vis;
  s.disc = r.disc_test;
  s.lab = r.lab_test;
  s.sensor = r.sensor;
  s.medium = r.medium;
  emit(s);
  return s;
}

GanStepStats GanTrainer::disc_step() {
  const PatchBatch live = sampler_.sample_live(config_.batch_size, rng_);
  const PatchBatch spoof = sampler_.sample_spoof(config_.batch_size, rng_);
  const auto [target_c, target_m] = draw_targets(config_.batch_size);
  opt_disc_.zero_grad();
  GanModels<float> m = models();
  const RealBatch<float> live_batch{live.images, live.sensor_onehot, live.medium_onehot};
  const RealBatch<float> spoof_batch{spoof.images, spoof.sensor_onehot, spoof.medium_onehot};
  const auto r = discriminator_objective(m, live_batch, spoof_batch, target_c, target_m, config_.weights);
  require_finite(r.total, "discriminator");
  if (config_.clip_grad_norm > 0) opt_disc_.clip_grad_norm(config_.clip_grad_norm);
  opt_disc_.step();
  require_finite(*disc_, "discriminator");
  require_finite(*lab_, "classifier");

  if (live_initialized_) {
    const double d = config_.live_ema_decay;
    live_.sensor = d * live_.sensor + (1.0 - d) * r.live.sensor;
    live_.medium = d * live_.medium + (1.0 - d) * r.live.medium;
  } else {
    live_ = r.live;
    live_initialized_ = true;
  }

  GanStepStats s;
  s.step = ++step_;
  s.phase = "disc";
  s.total = r.total;
  s.disc = r.disc_train;
  s.lab = r.lab_train;
  s.sensor = r.sensor;
  s.medium = r.medium;
  s.disc_accuracy = r.disc_accuracy;
  emit(s);
  return s;
}

void GanTrainer::round() {
  for (int i = 0; i < config_.steps_per_phase; ++i) gen_step();
  for (int i = 0; i < config_.steps_per_phase; ++i) disc_step();
  ++rounds_;
}

Checkpoint GanTrainer::checkpoint() const {
  Checkpoint c;
  c.header = base_header("gan", config_, arch_, n_c_, n_m_, step_, rng_);
  c.header["mode"] = to_string(mode_);
  c.header["rounds"] = rounds_;
  c.header["live"] = {{"sensor", live_.sensor}, {"medium", live_.medium}, {"initialized", live_initialized_}};
  export_parameters(c, "gen", gen_->parameters());
  export_parameters(c, "disc", disc_->parameters());
  export_parameters(c, "lab", lab_->parameters());
  if (bank_) export_parameters(c, "bank", bank_->parameters());
  export_optimizer(c, "opt.gen", opt_gen_);
  export_optimizer(c, "opt.disc", opt_disc_);
  return c;
}

// ---------------------------------------------------------------- GOLab

GolabTrainer::GolabTrainer(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                           std::optional<PatchBatch> augmentation)
    : config_(config),
      arch_(arch),
      n_c_(manifest.n_c),
      n_m_(manifest.n_m),
      sampler_(manifest, config.patch_size_gan),
      augmentation_(std::move(augmentation)),
      rng_(config.seed) {
  config_.validate();
  arch_.validate();
  if (sampler_.live_videos() + sampler_.spoof_videos() == 0) throw ValidationError("no training videos");
  if (augmentation_ && augmentation_->size() > 0) {
    if (augmentation_->images.dim(2) != config_.patch_size_gan || augmentation_->sensor_onehot.dim(1) != n_c_ ||
        augmentation_->medium_onehot.dim(1) != n_m_) {
      throw ValidationError("augmentation pool does not match the patch size or class counts");
    }
  }
  lab_ = std::make_unique<GoLab<float>>(arch_, n_c_, n_m_, config_.seed + 3);
  opt_ = nn::Adam<float>(lab_->parameters(), adam(config_.lr_lab));
}

int GolabTrainer::epoch_size() const {
  int synthetic = 0;
  if (augmentation_ && augmentation_->size() > 0 && config_.augment_ratio > 0) {
    synthetic = static_cast<int>(std::lround(config_.augment_ratio * config_.epoch_patches));
  }
  return config_.epoch_patches + synthetic;
}

void GolabTrainer::start_epoch() {
  epoch_ = sampler_.sample_any(config_.epoch_patches, rng_);
  const int synthetic = epoch_size() - config_.epoch_patches;
  if (synthetic > 0) {
    std::vector<int> pool(augmentation_->size());
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < synthetic) {
      std::shuffle(pool.begin(), pool.end(), rng_);
      const int take = std::min<int>(synthetic - static_cast<int>(chosen.size()), static_cast<int>(pool.size()));
      chosen.insert(chosen.end(), pool.begin(), pool.begin() + take);
    }
    epoch_.append(select_patches(*augmentation_, chosen));
  }
  order_.resize(epoch_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

GanStepStats GolabTrainer::step() {
  const int b = std::min(config_.batch_size, epoch_size());
  if (order_.empty() || cursor_ + b > order_.size()) start_epoch();
  const std::vector<int> idx(order_.begin() + cursor_, order_.begin() + cursor_ + b);
  cursor_ += b;
  const PatchBatch batch = select_patches(epoch_, idx);

  opt_.zero_grad();
  const auto out = lab_->forward(batch.images);
  const auto loss = lab_train_loss(out, batch.sensor_onehot, batch.medium_onehot);
  require_finite(loss.value, "classifier");
  lab_->backward(loss.grad_c, loss.grad_m);
  if (config_.clip_grad_norm > 0) opt_.clip_grad_norm(config_.clip_grad_norm);
  opt_.step();
  require_finite(*lab_, "classifier");

  GanStepStats s;
  s.step = ++step_;
  s.phase = "lab";
  s.total = loss.value;
  s.lab = loss.value;
  s.sensor = loss.sensor;
  s.medium = loss.medium;
  if (sink_) sink_({{"step", s.step}, {"phase", "lab"}, {"S_c", s.sensor}, {"S_m", s.medium}, {"J_lab", s.lab}});
  return s;
}

Checkpoint GolabTrainer::checkpoint() const {
  Checkpoint c;
  c.header = base_header("golab", config_, arch_, n_c_, n_m_, step_, rng_);
  c.header["augmented"] = augmentation_.has_value() && augmentation_->size() > 0;
  export_parameters(c, "lab", lab_->parameters());
  export_optimizer(c, "opt.lab", opt_);
  return c;
}

// ---------------------------------------------------------------- GOPad

GopadTrainer::GopadTrainer(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch)
    : config_(config),
      arch_(arch),
      n_c_(manifest.n_c),
      n_m_(manifest.n_m),
      sampler_(manifest, config.patch_size_pad),
      rng_(config.seed) {
  config_.validate();
  arch_.validate();
  if (sampler_.live_videos() == 0 || sampler_.spoof_videos() == 0) {
    throw ValidationError("GOPad training needs live and spoof training videos");
  }
  pad_ = std::make_unique<GoPad<float>>(arch_, config_.patch_size_pad, config_.seed + 5);
  opt_ = nn::Adam<float>(pad_->parameters(), adam(config_.lr_pad));
}

GanStepStats GopadTrainer::step() {
  const int n_live = std::max(1, config_.batch_size / 2);
  const int n_spoof = std::max(1, config_.batch_size - n_live);
  PatchBatch batch = sampler_.sample_live(n_live, rng_);
  batch.append(sampler_.sample_spoof(n_spoof, rng_));
  std::vector<bool> is_spoof(batch.size());
  for (int i = 0; i < batch.size(); ++i) is_spoof[i] = batch.medium_onehot.at(i, 0) == 0.0f;

  opt_.zero_grad();
  const Tensor<float> map = pad_->forward(batch.images);
  const Tensor<float> target = ground_truth_pad_map<float>(is_spoof, map.dim(1), map.dim(2));
  const auto loss = pad_loss(map, target);
  require_finite(loss.value, "GOPad");
  pad_->backward(loss.grad);
  if (config_.clip_grad_norm > 0) opt_.clip_grad_norm(config_.clip_grad_norm);
  opt_.step();
  require_finite(*pad_, "GOPad");

  GanStepStats s;
  s.step = ++step_;
  s.phase = "pad";
  s.total = loss.value;
  if (sink_) sink_({{"step", s.step}, {"phase", "pad"}, {"J_pad", s.total}});
  return s;
}

Checkpoint GopadTrainer::checkpoint() const {
  Checkpoint c;
  c.header = base_header("gopad", config_, arch_, n_c_, n_m_, step_, rng_);
  export_parameters(c, "pad", pad_->parameters());
  export_optimizer(c, "opt.pad", opt_);
  return c;
}

// ---------------------------------------------------------------- drivers

Checkpoint alternating_train(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                             const fs::path& out_dir, ConditioningMode mode) {
  GanTrainer trainer(manifest, config, arch, mode);
  RunWriter writer(out_dir);
  trainer.set_metrics_sink(writer.sink());
  return run_with_divergence_guard(trainer, writer, [&] {
    for (int r = 1; r <= config.total_rounds; ++r) {
      trainer.round();
      if (config.checkpoint_every > 0 && r % config.checkpoint_every == 0) {
        writer.save(trainer.checkpoint(), "round_" + std::to_string(r) + ".ckpt");
      }
    }
  });
}

Checkpoint ablation_onehot_maps(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                                const fs::path& out_dir) {
  return alternating_train(manifest, config, arch, out_dir, ConditioningMode::kOneHotMaps);
}

Checkpoint train_golab_standalone(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                                  const fs::path& out_dir, std::optional<PatchBatch> augmentation) {
  GolabTrainer trainer(manifest, config, arch, std::move(augmentation));
  RunWriter writer(out_dir);
  trainer.set_metrics_sink(writer.sink());
  return run_with_divergence_guard(trainer, writer, [&] {
    for (int s = 1; s <= config.golab_steps; ++s) {
      trainer.step();
      if (config.checkpoint_every > 0 && s % config.checkpoint_every == 0) {
        writer.save(trainer.checkpoint(), "step_" + std::to_string(s) + ".ckpt");
      }
    }
  });
}

Checkpoint train_gopad(const DatasetManifest& manifest, const TrainConfig& config, const ArchConfig& arch,
                       const fs::path& out_dir) {
  GopadTrainer trainer(manifest, config, arch);
  RunWriter writer(out_dir);
  trainer.set_metrics_sink(writer.sink());
  return run_with_divergence_guard(trainer, writer, [&] {
    for (int s = 1; s <= config.pad_steps; ++s) {
      trainer.step();
      if (config.checkpoint_every > 0 && s % config.checkpoint_every == 0) {
        writer.save(trainer.checkpoint(), "step_" + std::to_string(s) + ".ckpt");
      }
    }
  });
}

// ---------------------------------------------------------------- inference

ArchConfig checkpoint_arch(const Checkpoint& checkpoint) {
  try {
    return checkpoint.header.at("arch").get<ArchConfig>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("checkpoint has no valid architecture: ") + e.what());
  }
}

std::unique_ptr<GoLab<float>> load_golab(const Checkpoint& checkpoint) {
  if (!has_parameters(checkpoint, "lab")) throw ValidationError("checkpoint holds no trained GOLab");
  auto lab = std::make_unique<GoLab<float>>(checkpoint_arch(checkpoint), checkpoint.header.at("n_c").get<int>(),
                                            checkpoint.header.at("n_m").get<int>(), 0);
  import_parameters(checkpoint, "lab", lab->parameters());
  return lab;
}

std::unique_ptr<GoPad<float>> load_gopad(const Checkpoint& checkpoint) {
  if (!has_parameters(checkpoint, "pad")) throw ValidationError("checkpoint holds no trained GOPad");
  const TrainConfig config = checkpoint.header.at("train").get<TrainConfig>();
  auto pad = std::make_unique<GoPad<float>>(checkpoint_arch(checkpoint), config.patch_size_pad, 0);
  import_parameters(checkpoint, "pad", pad->parameters());
  return pad;
}

GeneratorBundle load_generator(const Checkpoint& checkpoint) {
  if (!has_parameters(checkpoint, "gen")) throw ValidationError("checkpoint holds no trained GOGen");
  GeneratorBundle g;
  g.mode = parse_conditioning_mode(checkpoint.header.at("mode").get<std::string>());
  g.num_sensors = checkpoint.header.at("n_c").get<int>();
  g.num_mediums = checkpoint.header.at("n_m").get<int>();
  g.patch_size = checkpoint.header.at("train").get<TrainConfig>().patch_size_gan;
  g.gen = std::make_unique<GoGen<float>>(checkpoint_arch(checkpoint),
                                         conditioning_channels(g.mode, g.num_sensors, g.num_mediums), 0);
  import_parameters(checkpoint, "gen", g.gen->parameters());
  if (g.mode == ConditioningMode::kPrototypes) {
    g.bank = std::make_unique<NoisePrototypeBank<float>>(g.num_sensors, g.num_mediums, g.patch_size);
    import_parameters(checkpoint, "bank", g.bank->parameters());
  }
  return g;
}

PatchBatch synthesize_augmentation_pool(const Checkpoint& checkpoint, const PatchBatch& live_patches,
                                        const std::vector<std::pair<int, int>>& combos, int count) {
  if (count < 0) throw ValidationError("augmentation count must be nonnegative");
  GeneratorBundle g = load_generator(checkpoint);
  for (const auto& [s, m] : combos) {
    if (m == 0) throw ValidationError("augmentation targets must be spoof mediums, got medium 0 (live)");
    if (s < 0 || s >= g.num_sensors || m < 0 || m >= g.num_mediums) {
      throw ValidationError("augmentation target (" + std::to_string(s) + ", " + std::to_string(m) +
                            ") is out of range");
    }
  }
  if (combos.empty() || count == 0) return make_patch_batch(0, g.patch_size, g.num_sensors, g.num_mediums);
  if (live_patches.size() == 0) throw ValidationError("augmentation needs at least one live patch");
  if (live_patches.images.dim(2) != g.patch_size) {
    throw ValidationError("live patches must be " + std::to_string(g.patch_size) + " pixels wide");
  }
  for (int i = 0; i < live_patches.size(); ++i) {
    if (live_patches.medium_onehot.at(i, 0) != 1.0f) {
      throw ValidationError("augmentation source patch " + std::to_string(i) + " is not live");
    }
  }

  GanModels<float> models{g.gen.get(), nullptr, nullptr, g.bank.get(), g.mode};
  PatchBatch pool;
  constexpr int kChunk = 40;
  for (int start = 0; start < count; start += kChunk) {
    const int n = std::min(kChunk, count - start);
    std::vector<int> sources(n);
    for (int i = 0; i < n; ++i) sources[i] = (start + i) % live_patches.size();
    PatchBatch chunk = select_patches(live_patches, sources);
    chunk.sensor_onehot.zero();
    chunk.medium_onehot.zero();
    for (int i = 0; i < n; ++i) {
      const auto [s, m] = combos[(start + i) % combos.size()];
      chunk.sensor_onehot.at(i, s) = 1.0f;
      chunk.medium_onehot.at(i, m) = 1.0f;
      chunk.source_video_ids[i] = "synth:" + chunk.source_video_ids[i];
    }
    chunk.images = synthesize(models, chunk.images, chunk.sensor_onehot, chunk.medium_onehot);
    pool.append(chunk);
  }
  return pool;
}

}  // namespace goas
