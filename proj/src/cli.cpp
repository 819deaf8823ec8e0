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

#include "goas/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "goas/checkpoint.hpp"
#include "goas/dataset.hpp"
#include "goas/error.hpp"
#include "goas/log.hpp"
#include "goas/plot.hpp"
#include "goas/spectrum.hpp"
#include "goas/synthetic.hpp"
#include "goas/training.hpp"

#ifndef GOAS_VERSION
#define GOAS_VERSION "0.0.0"
#endif

namespace goas::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return GOAS_VERSION; }

namespace {

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

bool non_empty_dir(const fs::path& dir) { return fs::is_directory(dir) && !fs::is_empty(dir); }

void prepare_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_directory(dir)) throw ValidationError(dir.string() + " exists and is not a directory");
  if (non_empty_dir(dir) && !force) {
    throw ValidationError("output directory " + dir.string() + " is not empty; pass --force to overwrite");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void prepare_file(const fs::path& file, bool force) {
  if (fs::exists(file) && !force) {
    throw ValidationError("output file " + file.string() + " exists; pass --force to overwrite");
  }
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) throw IoError("cannot create " + file.parent_path().string() + ": " + ec.message());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + " is not valid JSON: " + e.what());
  }
}

// Self-describing record of one invocation.
struct RunDescriptor {
  std::string command;
  std::vector<std::string> args;
  json config = json::object();
  std::uint64_t seed = 0;
  int workers = 1;
  std::string started = timestamp();

  void write(const fs::path& path) const {
    write_json(path, {{"command", command},
                      {"args", args},
                      {"config", config},
                      {"seed", seed},
                      {"workers", workers},
                      {"version", version()},
                      {"started", started},
                      {"finished", timestamp()}});
  }
};

std::vector<std::pair<int, int>> spoof_combos(int n_c, int n_m) {
  std::vector<std::pair<int, int>> combos;
  for (int s = 0; s < n_c; ++s) {
    for (int m = 1; m < n_m; ++m) combos.emplace_back(s, m);
  }
  return combos;
}

json video_scores_json(const std::vector<VideoScore>& scores) {
  json out = json::array();
  for (const auto& s : scores) {
    out.push_back({{"video_id", s.video_id},
                   {"video_score", s.video_score},
                   {"label", s.spoof ? "spoof" : "live"},
                   {"sensor_id", s.sensor_id},
                   {"medium_id", s.medium_id},
                   {"object_id", s.object_id},
                   {"background_id", s.background_id},
                   {"patches", s.patch_scores.size()}});
  }
  return out;
}

// ------------------------------------------------------------ subcommands

struct SynthArgs {
  int sensors = 3;
  int mediums = 3;
  int videos_per_combo = 4;
  int frames = 4;
  double amplitude = 0.08;
  std::uint64_t seed = 0;
  int size = 256;
  int test_period = 3;
  std::string combos;
  std::string out;
  bool force = false;
};

void cmd_synth(const SynthArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  fs::path dir = a.out;
  if (dir.empty()) {
    const char* cache = std::getenv("GOAS_CACHE");
    if (!cache || !*cache) throw ValidationError("--out is required when GOAS_CACHE is not set");
    dir = fs::path(cache) / ("synth-" + std::to_string(a.seed));
  }
  prepare_dir(dir, a.force);
  const SyntheticNoiseSpec spec = make_noise_spec(a.sensors, a.mediums, a.size, a.amplitude, a.seed);
  SyntheticLayout layout;
  layout.videos_per_combo = a.videos_per_combo;
  layout.frames = a.frames;
  layout.test_period = a.test_period;
  layout.combos = a.combos.empty() ? std::vector<std::pair<int, int>>{} : parse_combos(a.combos);
  const DatasetManifest manifest = generate_synthetic_dataset(spec, layout, dir);

  RunDescriptor d{"synth-data", args};
  d.seed = a.seed;
  d.config = {{"sensors", a.sensors}, {"mediums", a.mediums}, {"videos_per_combo", a.videos_per_combo},
              {"frames", a.frames},   {"amplitude", a.amplitude}, {"size", a.size},
              {"test_period", a.test_period}, {"combos", layout.combos}};
  d.write(dir / "run.json");
  out << "wrote " << manifest.records.size() << " videos (" << manifest.count(Split::kTrain) << " train, "
      << manifest.count(Split::kTest) << " test) to " << (dir / "manifest.jsonl").string() << '\n';
}

struct TrainArgs {
  std::string kind;
  std::string manifest;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string augment_from;
  std::optional<double> augment_ratio;
  int augment_pool = 0;
  std::string ablation;
  int workers = 1;
  bool force = false;
};

void cmd_train(const TrainArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  TrainConfig config;
  ArchConfig arch;
  if (!a.config.empty()) std::tie(config, arch) = load_config(a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.augment_ratio) config.augment_ratio = *a.augment_ratio;
  config.validate();
  if (!a.ablation.empty() && a.kind != "gan") throw ValidationError("--ablation applies to 'train gan' only");
  if (!a.augment_from.empty() && a.kind != "golab") throw ValidationError("--augment-from applies to 'train golab' only");
  const DatasetManifest manifest = load_manifest(a.manifest);
  const fs::path dir = a.out;
  prepare_dir(dir, a.force);

  RunDescriptor d{"train " + a.kind, args};
  d.seed = config.seed;
  d.workers = a.workers;
  json resolved = config;
  resolved["arch"] = arch;
  d.config = resolved;
  write_json(dir / "config.json", resolved);

  Checkpoint result;
  if (a.kind == "gan") {
    const ConditioningMode mode =
        a.ablation.empty() ? ConditioningMode::kPrototypes : parse_conditioning_mode(a.ablation);
    d.config["mode"] = to_string(mode);
    result = alternating_train(manifest, config, arch, dir, mode);
  } else if (a.kind == "golab") {
    std::optional<PatchBatch> pool;
    if (!a.augment_from.empty()) {
      const Checkpoint source = load_checkpoint(a.augment_from);
      const int pool_size = a.augment_pool > 0 ? a.augment_pool : config.epoch_patches;
      PatchSampler sampler(manifest, config.patch_size_gan);
      std::mt19937_64 rng(config.seed ^ 0x6175676du);
      const PatchBatch live = sampler.sample_live(pool_size, rng);
      pool = synthesize_augmentation_pool(source, live, spoof_combos(manifest.n_c, manifest.n_m), pool_size);
      d.config["augment_from"] = a.augment_from;
      d.config["augment_pool"] = pool_size;
    }
    result = train_golab_standalone(manifest, config, arch, dir, std::move(pool));
  } else {
    result = train_gopad(manifest, config, arch, dir);
  }
  d.write(dir / "run.json");
  out << "trained " << a.kind << " for " << result.header.at("step").get<std::int64_t>() << " steps; checkpoint "
      << (dir / "final.ckpt").string() << '\n';
}

struct AugmentArgs {
  std::string checkpoint;
  std::string manifest;
  std::string combos;
  int count = 100;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

void cmd_augment(const AugmentArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const DatasetManifest manifest = load_manifest(a.manifest);
  const auto combos = a.combos.empty() ? spoof_combos(manifest.n_c, manifest.n_m) : parse_combos(a.combos);
  const int patch = ckpt.header.at("train").at("patch_size_gan").get<int>();
  const fs::path dir = a.out;
  prepare_dir(dir, a.force);
  fs::create_directories(dir / "patches");

  PatchSampler sampler(manifest, patch);
  std::mt19937_64 rng(a.seed);
  const PatchBatch live = sampler.sample_live(std::max(1, a.count), rng);
  const PatchBatch pool = synthesize_augmentation_pool(ckpt, live, combos, a.count);

  std::ofstream labels(dir / "pool.jsonl", std::ios::trunc);
  for (int i = 0; i < pool.size(); ++i) {
    RgbImage image(patch, patch);
    for (int y = 0; y < patch; ++y) {
      for (int x = 0; x < patch; ++x) {
        for (int c = 0; c < 3; ++c) image.at(y, x, c) = to_byte(pool.images.at(i, c, y, x));
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "patch_%05d.png", i);
    write_png(dir / "patches" / name, image);
    int s = 0, m = 0;
    for (int k = 0; k < manifest.n_c; ++k) s = pool.sensor_onehot.at(i, k) > 0.5f ? k : s;
    for (int k = 0; k < manifest.n_m; ++k) m = pool.medium_onehot.at(i, k) > 0.5f ? k : m;
    labels << json{{"file", std::string("patches/") + name},
                   {"sensor_id", s},
                   {"medium_id", m},
                   {"source", pool.source_video_ids[i]}}
                  .dump()
           << '\n';
  }
  RunDescriptor d{"augment", args};
  d.seed = a.seed;
  d.config = {{"checkpoint", a.checkpoint}, {"manifest", a.manifest}, {"combos", combos}, {"count", a.count}};
  d.write(dir / "run.json");
  out << "wrote " << pool.size() << " synthetic patches to " << dir.string() << '\n';
}

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string split = "test";
  int patches = 20;
  std::uint64_t seed = 0;
  std::string report;
  std::string roc_dir;
  std::string aggregation = "vote";
  std::string hter_dev = "train";
  int workers = 1;
  bool force = false;
};

void cmd_eval(const EvalArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const DatasetManifest manifest = load_manifest(a.manifest);
  const Split split = parse_split(a.split);
  if (a.hter_dev != "train" && a.hter_dev != "test") throw ValidationError("--hter-dev must be train or test");
  prepare_file(a.report, a.force);
  if (!a.roc_dir.empty()) prepare_dir(a.roc_dir, a.force);

  ScoringOptions options;
  options.patches_per_frame = a.patches;
  options.seed = a.seed;
  options.aggregation = parse_aggregation(a.aggregation);
  options.workers = a.workers;

  const DatasetManifest test = select_split(manifest, split);
  if (test.records.empty()) throw ValidationError("split '" + a.split + "' has no records");
  DatasetManifest dev = a.hter_dev == "test" ? test : select_split(manifest, Split::kTrain);

  const std::string kind = ckpt.header.at("kind").get<std::string>();
  std::vector<VideoScore> test_scores, dev_scores;
  std::optional<ConfusionReport> confusion;
  auto usable = [](const DatasetManifest& m) {
    bool live = false, spoof = false;
    for (const auto& r : m.records) (r.is_live() ? live : spoof) = true;
    return live && spoof;
  };
  if (!usable(dev)) {
    log::warn("dev split lacks live or spoof videos; HTER threshold taken from the evaluated split");
    dev = test;
  }
  if (kind == "gopad") {
    auto pad = load_gopad(ckpt);
    options.patch_size = ckpt.header.at("train").at("patch_size_pad").get<int>();
    test_scores = score_videos_pad(*pad, test, options);
    dev_scores = a.hter_dev == "test" ? test_scores : score_videos_pad(*pad, dev, options);
  } else {
    auto lab = load_golab(ckpt);
    options.patch_size = ckpt.header.at("train").at("patch_size_gan").get<int>();
    const ArchConfig arch = checkpoint_arch(ckpt);
    const auto evals = score_videos(*lab, arch, test, options);
    std::vector<VideoPrediction> predictions;
    for (const auto& e : evals) {
      test_scores.push_back(e.score);
      predictions.push_back(e.prediction);
    }
    confusion = confusion_matrices(predictions, manifest.n_c, manifest.n_m);
    if (a.hter_dev == "test") {
      dev_scores = test_scores;
    } else {
      for (const auto& e : score_videos(*lab, arch, dev, options)) dev_scores.push_back(e.score);
    }
  }

  const MetricsReport report = make_report(dev_scores, test_scores);
  json j = report;
  j["split"] = a.split;
  j["aggregation"] = a.aggregation;
  j["patches_per_frame"] = a.patches;
  j["seed"] = a.seed;
  j["hter_dev"] = a.hter_dev;
  j["checkpoint_kind"] = kind;
  j["video_scores"] = video_scores_json(test_scores);
  if (confusion) j["confusion"] = *confusion;

  std::vector<RocCurve> overall{{"all", report.roc_points}};
  json groups = json::object();
  for (GroupBy g : {GroupBy::kSensor, GroupBy::kMedium, GroupBy::kObject, GroupBy::kBackground}) {
    json list = json::array();
    std::vector<RocCurve> curves;
    for (const auto& gr : grouped_roc(test_scores, g)) {
      list.push_back({{"group", gr.group}, {"auc", gr.report.auc}, {"eer", gr.report.eer},
                      {"live", gr.report.live_count}, {"spoof", gr.report.spoof_count}});
      curves.push_back({gr.group, gr.report.roc_points});
    }
    groups[to_string(g)] = list;
    if (!a.roc_dir.empty() && !curves.empty()) {
      write_png(fs::path(a.roc_dir) / ("roc_by_" + to_string(g) + ".png"), render_roc_plot(curves));
    }
  }
  j["groups"] = groups;
  write_json(a.report, j);

  RunDescriptor d{"eval", args};
  d.seed = a.seed;
  d.workers = a.workers;
  d.config = {{"checkpoint", a.checkpoint}, {"manifest", a.manifest}, {"split", a.split},
              {"patches", a.patches},       {"aggregation", a.aggregation}, {"hter_dev", a.hter_dev}};
  if (!a.roc_dir.empty()) {
    const fs::path dir = a.roc_dir;
    write_png(dir / "roc.png", render_roc_plot(overall));
    if (confusion) {
      write_json(dir / "confusion.json", *confusion);
      write_png(dir / "confusion_sensor.png", render_heatmap(confusion->sensor));
      write_png(dir / "confusion_medium.png", render_heatmap(confusion->medium));
    }
    d.write(dir / "run.json");
  } else {
    fs::path descriptor = a.report;
    descriptor.replace_extension(".run.json");
    d.write(descriptor);
  }
  out << std::fixed << std::setprecision(2) << "AUC " << report.auc << "  HTER " << report.hter << "  EER "
      << report.eer << "  (" << report.live_count << " live, " << report.spoof_count << " spoof videos)\n";
}

struct VizArgs {
  std::string checkpoint;
  std::string out;
  bool force = false;
};

void cmd_viz(const VizArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  if (!has_parameters(ckpt, "bank")) throw ValidationError("checkpoint holds no noise prototypes");
  const int n_c = ckpt.header.at("n_c").get<int>(), n_m = ckpt.header.at("n_m").get<int>();
  const int size = ckpt.header.at("train").at("patch_size_gan").get<int>();
  NoisePrototypeBank<float> bank(n_c, n_m, size);
  import_parameters(ckpt, "bank", bank.parameters());
  const fs::path dir = a.out;
  prepare_dir(dir, a.force);

  std::vector<std::vector<Tensor<double>>> grid(4);
  auto emit = [&](const Tensor<float>& proto, const std::string& name, int row) {
    const Tensor<double> map = proto.cast<double>();
    const Tensor<double> spectrum = log_power_spectrum(map);
    write_png(dir / (name + "_spatial.png"), render_map_grid({{map}}, 0));
    write_png(dir / (name + "_spectrum.png"), render_map_grid({{spectrum}}, 0));
    grid[row].push_back(map);
    grid[row + 1].push_back(spectrum);
  };
  char name[32];
  for (int s = 0; s < n_c; ++s) {
    std::snprintf(name, sizeof(name), "sensor_%02d", s);
    emit(bank.sensor(s), name, 0);
  }
  for (int m = 0; m < n_m; ++m) {
    std::snprintf(name, sizeof(name), "medium_%02d", m);
    emit(bank.medium(m), name, 2);
  }
  write_png(dir / "prototypes.png", render_map_grid(grid));
  RunDescriptor d{"viz-prototypes", args};
  d.config = {{"checkpoint", a.checkpoint}};
  d.write(dir / "run.json");
  out << "wrote " << (n_c + n_m) << " prototype visualizations to " << dir.string() << '\n';
}

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
  bool force = false;
};

void cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<fs::path> dirs(a.runs.begin(), a.runs.end());
  const auto rows = compare_runs(dirs);
  if (!a.out.empty()) {
    prepare_file(a.out, a.force);
    write_json(a.out, comparison_json(rows));
  }
  out << comparison_table(rows);
}

}  // namespace

// ------------------------------------------------------------ report helpers

std::vector<ComparisonRow> compare_runs(const std::vector<fs::path>& run_dirs) {
  if (run_dirs.empty()) throw ValidationError("report needs at least one run directory");
  std::vector<ComparisonRow> rows;
  for (const auto& dir : run_dirs) {
    const fs::path file = fs::is_regular_file(dir) ? dir : dir / "report.json";
    if (!fs::exists(file)) throw ValidationError("run " + dir.string() + " has no report.json");
    const MetricsReport r = read_json(file).get<MetricsReport>();
    const fs::path name = fs::is_regular_file(dir) ? dir.parent_path() : dir;
    rows.push_back({name.filename().empty() ? name.parent_path().filename().string() : name.filename().string(),
                    r.auc, r.hter, r.eer});
  }
  return rows;
}

json comparison_json(const std::vector<ComparisonRow>& rows) {
  json list = json::array();
  for (const auto& r : rows) list.push_back({{"run", r.run}, {"auc", r.auc}, {"hter", r.hter}, {"eer", r.eer}});
  return {{"runs", list}};
}

std::vector<ComparisonRow> comparison_from_json(const json& j) {
  std::vector<ComparisonRow> rows;
  try {
    for (const auto& r : j.at("runs")) {
      rows.push_back({r.at("run").get<std::string>(), r.at("auc").get<double>(), r.at("hter").get<double>(),
                      r.at("eer").get<double>()});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed comparison: ") + e.what());
  }
  return rows;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::size_t width = 3;
  for (const auto& r : rows) width = std::max(width, r.run.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "run" << std::right << std::setw(9) << "AUC"
      << std::setw(9) << "HTER" << std::setw(9) << "EER" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.run << std::right << std::setw(9) << r.auc
        << std::setw(9) << r.hter << std::setw(9) << r.eer << '\n';
  }
  return out.str();
}

std::vector<std::pair<int, int>> parse_combos(const std::string& text) {
  std::vector<std::pair<int, int>> combos;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("combination '" + item + "' must look like sensor:medium");
    try {
      std::size_t used_s = 0, used_m = 0;
      const std::string s_text = item.substr(0, colon), m_text = item.substr(colon + 1);
      const int s = std::stoi(s_text, &used_s), m = std::stoi(m_text, &used_m);
      if (used_s != s_text.size() || used_m != m_text.size()) throw std::invalid_argument(item);
      combos.emplace_back(s, m);
    } catch (const std::logic_error&) {
      throw ValidationError("combination '" + item + "' must look like sensor:medium");
    }
  }
  return combos;
}

// ------------------------------------------------------------ dispatch

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generic object anti-spoofing: synthetic data, training and evaluation", "goas"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print progress messages");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth-data", "Generate a procedural dataset with known noise");
  s->add_option("--sensors", synth.sensors, "Number of sensors")->check(CLI::PositiveNumber);
  s->add_option("--mediums", synth.mediums, "Number of mediums, live included")->check(CLI::Range(1, 7));
  s->add_option("--videos-per-combo", synth.videos_per_combo, "Videos per sensor/medium pair")->check(CLI::PositiveNumber);
  s->add_option("--frames", synth.frames, "Frames per video")->check(CLI::PositiveNumber);
  s->add_option("--amplitude", synth.amplitude, "Noise amplitude in [0, 0.5]");
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--size", synth.size, "Frame height and width in pixels")->check(CLI::PositiveNumber);
  s->add_option("--test-period", synth.test_period, "Every n-th video of a pair goes to the test split (0: none)");
  s->add_option("--combos", synth.combos, "Pairs to generate, e.g. 0:0,0:1,1:2 (default: all)");
  s->add_option("--out", synth.out, "Output directory (default: $GOAS_CACHE/synth-<seed>)");
  s->add_flag("--force", synth.force, "Overwrite a non-empty output directory");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train the GAN, the classifier or the binary baseline");
  t->add_option("kind", train.kind, "gan, golab or gopad")->required()->check(CLI::IsMember({"gan", "golab", "gopad"}));
  t->add_option("--manifest", train.manifest, "Dataset manifest")->required();
  t->add_option("--config", train.config, "JSON training config");
  t->add_option("--out", train.out, "Run directory")->required();
  t->add_option("--seed", train.seed, "Overrides the config seed");
  t->add_option("--augment-from", train.augment_from, "GAN checkpoint used to synthesize extra training patches");
  t->add_option("--augment-ratio", train.augment_ratio, "Synthetic patches per real patch in an epoch");
  t->add_option("--augment-pool", train.augment_pool, "Size of the synthetic pool (default: epoch size)");
  t->add_option("--ablation", train.ablation, "Conditioning variant")->check(CLI::IsMember({"onehot-maps"}));
  t->add_option("--workers", train.workers, "Worker threads (training runs single-threaded)")->check(CLI::PositiveNumber);
  t->add_flag("--force", train.force, "Overwrite a non-empty run directory");

  AugmentArgs augment;
  auto* g = app.add_subcommand("augment", "Write synthetic spoof patches for chosen sensor/medium pairs");
  g->add_option("--checkpoint", augment.checkpoint, "GAN checkpoint")->required();
  g->add_option("--manifest", augment.manifest, "Manifest providing live patches")->required();
  g->add_option("--combos", augment.combos, "Target pairs, e.g. 2:3,0:1 (default: all spoof pairs)");
  g->add_option("--count", augment.count, "Number of patches")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", augment.seed, "Random seed");
  g->add_option("--out", augment.out, "Output directory")->required();
  g->add_flag("--force", augment.force, "Overwrite a non-empty output directory");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score videos and compute AUC, HTER and EER");
  e->add_option("--checkpoint", eval.checkpoint, "Trained checkpoint")->required();
  e->add_option("--manifest", eval.manifest, "Dataset manifest")->required();
  e->add_option("--split", eval.split, "Split to evaluate")->check(CLI::IsMember({"train", "test"}));
  e->add_option("--patches", eval.patches, "Patches per frame")->check(CLI::PositiveNumber);
  e->add_option("--seed", eval.seed, "Random seed for patch placement");
  e->add_option("--report", eval.report, "Output report JSON")->required();
  e->add_option("--roc-dir", eval.roc_dir, "Directory for ROC and confusion plots");
  e->add_option("--aggregation", eval.aggregation, "vote or mean")->check(CLI::IsMember({"vote", "mean"}));
  e->add_option("--hter-dev", eval.hter_dev, "Split that fixes the HTER threshold")->check(CLI::IsMember({"train", "test"}));
  e->add_option("--workers", eval.workers, "Parallel scoring workers")->check(CLI::PositiveNumber);
  e->add_flag("--force", eval.force, "Overwrite existing outputs");

  VizArgs viz;
  auto* v = app.add_subcommand("viz-prototypes", "Render noise prototypes and their power spectra");
  v->add_option("--checkpoint", viz.checkpoint, "GAN checkpoint")->required();
  v->add_option("--out", viz.out, "Output directory")->required();
  v->add_flag("--force", viz.force, "Overwrite a non-empty output directory");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Compare evaluation reports of several runs");
  r->add_option("runs", report.runs, "Run directories holding report.json")->required();
  r->add_option("--out", report.out, "Comparison JSON");
  r->add_flag("--force", report.force, "Overwrite an existing comparison file");

  CLI::App* chosen = nullptr;
  for (const auto& a : args) {
    if (!chosen) {
      chosen = app.get_subcommand_no_throw(a);
      continue;
    }
    if (a == "--") break;
    if (a.rfind("--", 0) != 0) continue;
    const std::string name = a.substr(0, a.find('='));
    if (!chosen->get_option_no_throw(name) && !app.get_option_no_throw(name)) {
      err << "The following argument was not expected: " << name << "\nRun with --help for more information.\n";
      return kValidationFailure;
    }
  }

  std::vector<const char*> argv{"goas"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  log::set_verbose(verbose);
  try {
    if (s->parsed()) cmd_synth(synth, args, out);
    if (t->parsed()) cmd_train(train, args, out);
    if (g->parsed()) cmd_augment(augment, args, out);
    if (e->parsed()) cmd_eval(eval, args, out);
    if (v->parsed()) cmd_viz(viz, args, out);
    if (r->parsed()) cmd_report(report, out);
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace goas::cli
