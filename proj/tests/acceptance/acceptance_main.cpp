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

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "goas/error.hpp"
#include "goas/evaluation.hpp"
#include "goas/log.hpp"
#include "goas/spectrum.hpp"
#include "goas/training.hpp"
#include "gradient_suite.hpp"
#include "test_support.hpp"

namespace goas::acceptance {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Default layer counts with narrow widths.
ArchConfig compact_arch() {
  ArchConfig a;
  const int w = 8;
  a.gen_channels = {w, w, 2 * w, 2 * w, w, w, w};
  a.disc_channels = {w, w, w, w, 2 * w, 2 * w, 2 * w, 2 * w, 2 * w, 2 * w};
  a.disc_hidden = 32;
  a.lab_channels = {w, w, w, 2 * w, 2 * w, 2 * w, 2 * w, 2 * w, 2 * w, 2 * w, 2 * w};
  a.lab_hidden = 32;
  return a;
}

TrainConfig compact_config(std::uint64_t seed) {
  TrainConfig c;
  c.batch_size = 16;
  c.patch_size_gan = 32;
  c.patch_size_pad = 64;
  c.lr_gen = c.lr_disc = c.lr_lab = c.lr_pad = 1e-3;
  c.epoch_patches = 2000;
  c.seed = seed;
  return c;
}

// 3 sensors x 3 mediums (live included); every third video is held out.
DatasetManifest procedural_dataset(const fs::path& dir, double amplitude, std::uint64_t seed,
                                   SyntheticNoiseSpec* spec_out = nullptr, int videos_per_combo = 5) {
  SyntheticLayout layout;
  layout.videos_per_combo = videos_per_combo;
  layout.frames = 3;
  layout.test_period = 3;
  const SyntheticNoiseSpec spec = make_noise_spec(3, 3, 128, amplitude, seed);
  if (spec_out) *spec_out = spec;
  return generate_synthetic_dataset(spec, layout, dir);
}

// Test records relabelled as train so a PatchSampler can draw from them.
DatasetManifest held_out_pool(const DatasetManifest& manifest) {
  DatasetManifest test = select_split(manifest, Split::kTest);
  for (auto& r : test.records) r.split = Split::kTrain;
  return test;
}

// ---------------------------------------------------------------- 1

Outcome metric_oracles() {
  std::mt19937_64 rng(2024);
  int auc_mismatch = 0;
  double worst_eer_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> count(1, 100);
    const int n_live = count(rng), n_spoof = count(rng);
    std::uniform_int_distribution<int> shift(0, 4000);
    const int offset = shift(rng);
    std::uniform_int_distribution<int> live_level(0, 10000 - offset), spoof_level(offset, 10000);
    std::vector<int> live(n_live), spoof(n_spoof);
    for (auto& v : live) v = live_level(rng);
    for (auto& v : spoof) v = spoof_level(rng);

    std::vector<VideoScore> scores;
    for (int v : live) scores.push_back(make_video_score("l", v / 10000.0, false));
    for (int v : spoof) scores.push_back(make_video_score("s", v / 10000.0, true));

    double wins = 0.0;
    for (int s : spoof) {
      for (int l : live) wins += s > l ? 1.0 : (s == l ? 0.5 : 0.0);
    }
    const double oracle_auc = 100.0 * wins / (static_cast<double>(n_live) * n_spoof);
    if (std::abs(compute_auc(scores) - oracle_auc) > 1e-9) ++auc_mismatch;

    // Histogram sweep over k / 10000 thresholds, k = 0..10000.
    std::vector<int> live_hist(10001, 0), spoof_hist(10001, 0);
    for (int v : live) ++live_hist[v];
    for (int v : spoof) ++spoof_hist[v];
    int live_at_or_above = n_live, spoof_below = 0;
    double best_gap = 2.0, oracle_eer = 0.0;
    for (int k = 0; k <= 10000; ++k) {
      const double far = static_cast<double>(spoof_below) / n_spoof;
      const double frr = static_cast<double>(live_at_or_above) / n_live;
      const double gap = std::abs(far - frr);
      if (gap < best_gap - 1e-12) {
        best_gap = gap;
        oracle_eer = 50.0 * (far + frr);
      }
      live_at_or_above -= live_hist[k];
      spoof_below += spoof_hist[k];
    }
    worst_eer_gap = std::max(worst_eer_gap, std::abs(compute_eer(scores).eer - oracle_eer));
  }
  return {auc_mismatch == 0 && worst_eer_gap <= 0.5,
          "1000 sets: AUC mismatches " + std::to_string(auc_mismatch) + ", worst EER gap " + fmt(worst_eer_gap, 4) +
              " pp"};
}

// ---------------------------------------------------------------- 2

Outcome gradient_suite() {
  const auto cases = testing::run_gradient_suite(10);
  bool pass = true;
  std::string worst_name;
  double worst = 0.0;
  for (const auto& c : cases) {
    const bool ok = c.check.checked > 0 && c.check.max_abs_analytic > 0 && c.check.max_rel_error < 1e-3;
    pass &= ok;
    if (c.check.max_rel_error >= worst) {
      worst = c.check.max_rel_error;
      worst_name = c.name;
    }
    if (!ok) worst_name = c.name + " (failed)";
  }
  std::ostringstream s;
  s << cases.size() << " losses checked, worst relative error " << std::scientific << std::setprecision(2) << worst
    << " in " << worst_name;
  return {pass, s.str()};
}

// ---------------------------------------------------------------- 3

Outcome prototype_mechanics() {
  const auto bank = init_bank<double>(7, 7, 16, BankInit::kGaussian, 3, 0.05);
  bool identity = true;
  for (int i = 0; i < 7; ++i) {
    std::vector<double> a(7, 0.0);
    a[i] = 1.0;
    const auto sel = select_prototype<double>(bank, a, a);
    identity &= sel.sensor == bank.sensor(i) && sel.medium == bank.medium(i);
  }

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst_linear = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(7), b(7), mix(7), zero(7, 0.0);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = n(rng);
    const double alpha = n(rng), beta = n(rng);
    for (int i = 0; i < 7; ++i) mix[i] = alpha * a[i] + beta * b[i];
    const auto sa = select_prototype<double>(bank, a, zero).sensor;
    const auto sb = select_prototype<double>(bank, b, zero).sensor;
    const auto sm = select_prototype<double>(bank, mix, zero).sensor;
    for (std::size_t k = 0; k < sm.size(); ++k) {
      const double expected = alpha * sa[k] + beta * sb[k];
      worst_linear = std::max(worst_linear, std::abs(sm[k] - expected) / std::max(1.0, std::abs(expected)));
    }
  }

  testing::ToyGan gan;
  testing::ToyBatches batches = testing::toy_batches();
  GanModels<double> models = gan.models();
  const LossWeights weights;
  gan.zero_all();
  generator_objective(models, batches.live, batches.target_c, batches.target_m, LiveLossStats{0.6, 0.9}, weights);
  const double gen_flow = testing::abs_grad_sum(gan.bank.parameters());
  gan.zero_all();
  discriminator_objective(models, batches.live_batch, batches.spoof_batch, batches.target_c, batches.target_m,
                          weights);
  const double disc_flow = testing::abs_grad_sum(gan.bank.parameters());

  const bool pass = identity && worst_linear <= 1e-6 && gen_flow > 0.0 && disc_flow == 0.0;
  std::ostringstream s;
  s << "one-hot identity " << (identity ? "bit-equal" : "BROKEN") << ", linearity error " << std::scientific
    << std::setprecision(2) << worst_linear << ", bank |grad| via generator " << gen_flow << ", via discriminator "
    << disc_flow;
  return {pass, s.str()};
}

// ---------------------------------------------------------------- 4

std::vector<Tensor<float>> snapshot(const std::vector<nn::Parameter<float>*>& params) {
  std::vector<Tensor<float>> out;
  for (auto* p : params) out.push_back(p->value);
  return out;
}

bool unchanged(const std::vector<Tensor<float>>& before, const std::vector<nn::Parameter<float>*>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(before[i] == params[i]->value)) return false;
  }
  return true;
}

bool same_checkpoint(const Checkpoint& a, const Checkpoint& b) {
  if (a.header != b.header || a.tensors.size() != b.tensors.size()) return false;
  for (const auto& [name, t] : a.tensors) {
    if (!b.has(name) || !(t == b.tensor(name))) return false;
  }
  return true;
}

Outcome phase_isolation(const fs::path& work) {
  const DatasetManifest manifest = testing::small_synthetic_dataset(work / "data");
  TrainConfig config = compact_config(9);
  config.patch_size_gan = 16;
  config.batch_size = 4;
  const ArchConfig arch = compact_arch();

  GanTrainer trainer(manifest, config, arch);
  int isolated_rounds = 0;
  for (int r = 0; r < 10; ++r) {
    auto disc = snapshot(trainer.disc().parameters());
    auto lab = snapshot(trainer.lab().parameters());
    trainer.gen_step();
    const bool gen_ok = unchanged(disc, trainer.disc().parameters()) && unchanged(lab, trainer.lab().parameters());
    auto gen = snapshot(trainer.gen().parameters());
    auto bank = snapshot(trainer.bank()->parameters());
    trainer.disc_step();
    const bool disc_ok = unchanged(gen, trainer.gen().parameters()) && unchanged(bank, trainer.bank()->parameters());
    isolated_rounds += gen_ok && disc_ok;
  }

  auto logged_run = [&](int rounds) {
    std::vector<std::string> lines;
    GanTrainer t(manifest, config, arch);
    t.set_metrics_sink([&](const nlohmann::json& line) { lines.push_back(line.dump()); });
    for (int r = 0; r < rounds; ++r) t.round();
    return std::make_pair(lines, t.checkpoint());
  };
  const auto [log_a, straight] = logged_run(6);
  const auto [log_b, unused] = logged_run(6);
  const bool same_logs = log_a == log_b;

  GanTrainer first(manifest, config, arch);
  for (int r = 0; r < 3; ++r) first.round();
  save_checkpoint(first.checkpoint(), work / "mid.ckpt");
  GanTrainer resumed(manifest, load_checkpoint(work / "mid.ckpt"));
  for (int r = 0; r < 3; ++r) resumed.round();
  const bool resume_ok = same_checkpoint(straight, resumed.checkpoint());

  return {isolated_rounds == 10 && same_logs && resume_ok,
          "isolated rounds " + std::to_string(isolated_rounds) + "/10, resume " +
              (resume_ok ? "bit-identical" : "DIFFERS") + ", rerun logs " + (same_logs ? "identical" : "DIFFER")};
}

// ---------------------------------------------------------------- 5

Outcome ground_truth_recovery(const fs::path& work) {
  const DatasetManifest manifest = procedural_dataset(work / "data", 0.08, 7);
  TrainConfig config = compact_config(1);
  config.golab_steps = 2000;
  const ArchConfig arch = compact_arch();
  GolabTrainer trainer(manifest, config, arch);
  for (int s = 0; s < config.golab_steps; ++s) trainer.step();

  ScoringOptions options;
  options.patches_per_frame = 10;
  options.patch_size = config.patch_size_gan;
  options.seed = 3;
  const auto evaluations = score_videos(trainer.lab(), arch, select_split(manifest, Split::kTest), options);
  int sensor_hits = 0, medium_hits = 0, total = 0;
  for (const auto& e : evaluations) {
    for (std::size_t i = 0; i < e.prediction.sensor_votes.size(); ++i) {
      sensor_hits += e.prediction.sensor_votes[i] == e.prediction.sensor_id;
      medium_hits += e.prediction.medium_votes[i] == e.prediction.medium_id;
      ++total;
    }
  }
  const double sensor_acc = 100.0 * sensor_hits / total, medium_acc = 100.0 * medium_hits / total;
  return {sensor_acc >= 90.0 && medium_acc >= 80.0,
          "held-out patch rank-1 accuracy after 2000 steps: sensor " + fmt(sensor_acc, 1) + "%, medium " +
              fmt(medium_acc, 1) + "% (" + std::to_string(total) + " patches, " +
              std::to_string(evaluations.size()) + " videos)"};
}

// ---------------------------------------------------------------- 6

Tensor<double> channel_mean_residual(const Tensor<float>& synth, const Tensor<float>& live, int index) {
  const int size = live.dim(2);
  Tensor<double> out({size, size});
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) sum += synth.at(index, c, y, x) - live.at(index, c, y, x);
      out.at(y, x) = sum / 3.0;
    }
  }
  return out;
}

Tensor<double> crop(const Tensor<double>& map, int size) {
  Tensor<double> out({size, size});
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) out.at(y, x) = map.at(y, x);
  }
  return out;
}

Outcome targeted_synthesis(const fs::path& work) {
  SyntheticNoiseSpec spec;
  const DatasetManifest manifest = procedural_dataset(work / "data", 0.08, 7, &spec);
  TrainConfig config = compact_config(1);
  config.total_rounds = 500;
  const ArchConfig arch = compact_arch();
  GanTrainer trainer(manifest, config, arch);
  for (int r = 0; r < config.total_rounds; ++r) trainer.round();

  const int patch = config.patch_size_gan, count = 120;
  const PatchSampler held_out(held_out_pool(manifest), patch);
  std::mt19937_64 rng(5);
  const PatchBatch live = held_out.sample_live(count, rng);
  Tensor<float> target_c({count, manifest.n_c}), target_m({count, manifest.n_m});
  std::vector<int> target(count);
  for (int i = 0; i < count; ++i) {
    target_c.at(i, i % manifest.n_c) = 1.0f;
    target[i] = 1 + (i / manifest.n_c) % (manifest.n_m - 1);
    target_m.at(i, target[i]) = 1.0f;
  }
  GanModels<float> models = trainer.models();
  const Tensor<float> synth = synthesize(models, live.images, target_c, target_m);

  std::vector<Tensor<double>> patterns;
  for (const auto& p : spec.medium_patterns) patterns.push_back(crop(p, patch));
  int hits = 0;
  for (int i = 0; i < count; ++i) {
    const Tensor<double> residual = channel_mean_residual(synth, live.images, i);
    const double own = spectral_correlation(residual, patterns[target[i]]);
    bool best = true;
    for (int m = 1; m < manifest.n_m; ++m) {
      if (m != target[i] && spectral_correlation(residual, patterns[m]) >= own) best = false;
    }
    hits += best;
  }
  const double rate = 100.0 * hits / count;
  return {rate >= 70.0, "residual spectrum closest to the target medium in " + fmt(rate, 1) + "% of " +
                            std::to_string(count) + " held-out live patches after " +
                            std::to_string(config.total_rounds) + " rounds"};
}

// ---------------------------------------------------------------- 7

double video_auc(GoLab<float>& lab, const ArchConfig& arch, const DatasetManifest& test, int patch) {
  ScoringOptions options;
  options.patches_per_frame = 10;
  options.patch_size = patch;
  options.seed = 11;
  std::vector<VideoScore> scores;
  for (auto& e : score_videos(lab, arch, test, options)) scores.push_back(e.score);
  return compute_auc(scores);
}

Outcome augmentation_trend(const fs::path& work) {
  const ArchConfig arch = compact_arch();
  int wins = 0;
  std::string numbers;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const DatasetManifest full = procedural_dataset(work / ("data" + std::to_string(seed)), 0.08, 100 + seed, nullptr, 9);
    // Spoof training videos only for 2 of the 6 spoof pairs; the test split keeps every pair.
    const std::set<std::pair<int, int>> seen{{0, 1}, {1, 2}};
    DatasetManifest restricted = full;
    std::erase_if(restricted.records, [&](const VideoRecord& r) {
      return r.split == Split::kTrain && !r.is_live() && !seen.contains({r.sensor_id, r.medium_id});
    });
    const DatasetManifest test = select_split(full, Split::kTest);

    TrainConfig config = compact_config(seed);
    config.total_rounds = 500;
    config.golab_steps = 800;
    config.augment_ratio = 0.1;
    const Checkpoint gan = alternating_train(restricted, config, arch, {});

    std::vector<std::pair<int, int>> unseen;
    for (int s = 0; s < full.n_c; ++s) {
      for (int m = 1; m < full.n_m; ++m) {
        if (!seen.contains({s, m})) unseen.push_back({s, m});
      }
    }
    const PatchSampler sampler(restricted, config.patch_size_gan);
    std::mt19937_64 rng(seed ^ 0x6175676dULL);
    const PatchBatch pool = synthesize_augmentation_pool(gan, sampler.sample_live(200, rng), unseen,
                                                         static_cast<int>(config.augment_ratio * config.epoch_patches));

    GolabTrainer plain(restricted, config, arch);
    GolabTrainer augmented(restricted, config, arch, pool);
    for (int s = 0; s < config.golab_steps; ++s) {
      plain.step();
      augmented.step();
    }
    const double auc_plain = video_auc(plain.lab(), arch, test, config.patch_size_gan);
    const double auc_aug = video_auc(augmented.lab(), arch, test, config.patch_size_gan);
    wins += auc_aug >= auc_plain;
    numbers += (numbers.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " AUC " +
               fmt(auc_plain) + " -> " + fmt(auc_aug);
  }
  return {wins >= 2, "augmented >= plain in " + std::to_string(wins) + "/3 repeats (" + numbers + ")"};
}

// ---------------------------------------------------------------- 8

Outcome gopad_baseline(const fs::path& work) {
  const DatasetManifest manifest = procedural_dataset(work / "data", 0.15, 7);
  TrainConfig config = compact_config(1);
  config.pad_steps = 200;
  ArchConfig arch;
  arch.pad_map_size = 8;
  const Checkpoint c = train_gopad(manifest, config, arch, {});
  auto pad = load_gopad(c);

  ScoringOptions options;
  options.patches_per_frame = 10;
  options.patch_size = config.patch_size_pad;
  options.seed = 3;
  const auto scores = score_videos_pad(*pad, select_split(manifest, Split::kTest), options);
  int correct = 0;
  for (const auto& v : scores) correct += (v.video_score > 0.5) == v.spoof;
  const double accuracy = 100.0 * correct / static_cast<double>(scores.size());

  const ArchConfig full;
  GoPad<float> deployed(full, 256, 1);
  GoPad<float> reference(full, ArchConfig::pad_reference_channels(), 256, 1);
  const double ratio = static_cast<double>(deployed.parameter_count()) / reference.parameter_count();
  return {accuracy >= 85.0 && ratio <= 1.0 / 3.0,
          "video accuracy " + fmt(accuracy, 1) + "% on " + std::to_string(scores.size()) + " held-out videos, " +
              std::to_string(deployed.parameter_count()) + " / " + std::to_string(reference.parameter_count()) +
              " parameters (ratio " + fmt(ratio, 3) + ")"};
}

// ---------------------------------------------------------------- 9

bool is_png(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, 8);
  return in && std::string(magic + 1, 3) == "PNG";
}

Outcome cli_end_to_end(const fs::path& work, const std::string& binary) {
  const std::string data = (work / "data").string(), run = (work / "run").string();
  {
    nlohmann::json arch = compact_arch();
    const nlohmann::json config = {{"batch_size", 16}, {"patch_size_gan", 32}, {"lr_lab", 1e-3},
                                   {"golab_steps", 300}, {"epoch_patches", 1000}, {"arch", arch}};
    std::ofstream(work / "config.json") << config.dump(2);
  }
  const std::vector<std::string> commands{
      binary + " synth-data --sensors 3 --mediums 3 --videos-per-combo 3 --frames 2 --size 96 --seed 4 --out " + data,
      binary + " train golab --manifest " + data + "/manifest.jsonl --config " + (work / "config.json").string() +
          " --out " + run + " --seed 4",
      binary + " eval --checkpoint " + run + "/final.ckpt --manifest " + data +
          "/manifest.jsonl --split test --patches 5 --seed 4 --report " + run + "/report.json --roc-dir " + run +
          "/plots",
  };
  for (const auto& command : commands) {
    const int status = std::system((command + " > " + (work / "cli.log").string() + " 2>&1").c_str());
    if (status != 0) return {false, "command failed (" + std::to_string(status) + "): " + command};
  }

  std::ifstream in(run + "/report.json");
  const nlohmann::json report = nlohmann::json::parse(in);
  bool schema = true;
  for (const char* key : {"auc", "eer", "hter", "eer_threshold", "hter_threshold", "roc_points", "counts", "video_scores", "confusion"}) {
    schema &= report.contains(key);
  }
  MetricsReport parsed;
  try {
    parsed = report.get<MetricsReport>();
  } catch (const std::exception&) {
    schema = false;
  }
  schema &= parsed.auc >= 0 && parsed.auc <= 100 && parsed.eer >= 0 && parsed.eer <= 100 &&
            parsed.live_count > 0 && parsed.spoof_count > 0 && !parsed.roc_points.empty();
  const bool plots = is_png(run + "/plots/roc.png") && is_png(run + "/plots/confusion_sensor.png");
  return {schema && plots, std::string("report ") + (schema ? "valid" : "INVALID") + " (AUC " + fmt(parsed.auc) +
                               ", EER " + fmt(parsed.eer) + ", HTER " + fmt(parsed.hter) + "), ROC PNGs " +
                               (plots ? "present" : "MISSING")};
}

}  // namespace
}  // namespace goas::acceptance

int main(int argc, char** argv) {
  using namespace goas::acceptance;
  CLI::App app{"Acceptance criteria runner"};
  std::vector<int> selected;
  std::string keep;
  std::string binary = GOAS_CLI_PATH;
  app.add_option("criteria", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--keep", keep, "Keep work files under this directory");
  app.add_option("--cli", binary, "Path of the goas executable");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  goas::log::set_sink([](goas::log::Level, const std::string&) {});
  goas::testing::TempDir scratch;
  const fs::path root = keep.empty() ? scratch.path() : fs::path(keep);

  const std::map<int, std::pair<std::string, std::function<Outcome(const fs::path&)>>> criteria{
      {1, {"metric oracles", [](const fs::path&) { return metric_oracles(); }}},
      {2, {"gradient suite", [](const fs::path&) { return gradient_suite(); }}},
      {3, {"prototype mechanics", [](const fs::path&) { return prototype_mechanics(); }}},
      {4, {"phase isolation and determinism", phase_isolation}},
      {5, {"synthetic ground-truth recovery", ground_truth_recovery}},
      {6, {"targeted synthesis", targeted_synthesis}},
      {7, {"augmentation trend", augmentation_trend}},
      {8, {"GOPad baseline", gopad_baseline}},
      {9, {"CLI end to end", [&](const fs::path& dir) { return cli_end_to_end(dir, binary); }}},
  };

  bool all_pass = true;
  for (int id : selected) {
    const auto& [name, body] = criteria.at(id);
    const fs::path work = root / ("criterion" + std::to_string(id));
    fs::create_directories(work);
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = body(work);
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << outcome.detail
              << " [" << fmt(seconds, 1) << " s]" << std::endl;
    all_pass &= outcome.pass;
  }
  return all_pass ? 0 : 1;
}
