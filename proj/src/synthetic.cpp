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

#include "goas/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "goas/error.hpp"
#include "goas/log.hpp"
#include "goas/spectrum.hpp"

namespace goas {

namespace fs = std::filesystem;

namespace {

constexpr double kPatternRms = 0.5;
constexpr double kRingWidth = 0.03;

// Cycles per 64 pixels along (x, y) for mediums 1..6.
constexpr std::array<std::array<int, 2>, 6> kGratings{{{16, 0}, {0, 22}, {11, 11}, {20, -8}, {6, 26}, {28, 4}}};

std::mt19937_64 seeded(std::uint64_t seed, std::uint32_t tag, std::uint32_t a, std::uint32_t b = 0,
                       std::uint32_t c = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag, a, b, c};
  return std::mt19937_64(seq);
}

void normalize(Tensor<double>& map) {
  const double mean = map.sum() / static_cast<double>(map.size());
  double energy = 0.0;
  for (auto& v : map.values()) {
    v -= mean;
    energy += v * v;
  }
  const double rms = std::sqrt(energy / static_cast<double>(map.size()));
  if (rms > 0) map *= kPatternRms / rms;
}

double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

void SyntheticNoiseSpec::validate() const {
  if (sensor_patterns.empty() || medium_patterns.empty()) {
    throw ValidationError("synthetic spec needs at least one sensor and one medium pattern");
  }
  if (!(amplitude >= 0.0 && amplitude <= 0.5)) throw ValidationError("synthetic amplitude must lie in [0, 0.5]");
  const Shape shape = sensor_patterns.front().shape();
  if (shape.size() != 2 || shape[0] != shape[1] || shape[0] < 1) {
    throw ShapeError("synthetic patterns must be square H x W maps, got " + shape_string(shape));
  }
  auto check = [&](const Tensor<double>& p, const std::string& what) {
    if (p.shape() != shape) throw ShapeError(what + " has shape " + shape_string(p.shape()));
    if (!p.all_finite()) throw ValidationError(what + " contains non-finite values");
    const double mean = p.sum() / static_cast<double>(p.size());
    if (std::abs(mean) > 1e-9) throw ValidationError(what + " is not zero-mean");
  };
  for (std::size_t i = 0; i < sensor_patterns.size(); ++i) check(sensor_patterns[i], "sensor pattern " + std::to_string(i));
  for (std::size_t i = 0; i < medium_patterns.size(); ++i) check(medium_patterns[i], "medium pattern " + std::to_string(i));
  for (double v : medium_patterns.front().values()) {
    if (v != 0.0) throw ValidationError("medium pattern 0 (live) must be identically zero");
  }
}

Tensor<double> sensor_pattern(int index, int num_sensors, int size, std::uint64_t seed) {
  if (num_sensors < 1 || index < 0 || index >= num_sensors) throw ValidationError("sensor index out of range");
  if (size < 2) throw ValidationError("pattern size must be at least 2");
  auto rng = seeded(seed, 0x53454e53u, static_cast<std::uint32_t>(index));
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor<double> white({size, size});
  for (auto& v : white.values()) v = normal(rng);

  const double radius = num_sensors == 1 ? 0.25 : 0.12 + 0.33 * index / (num_sensors - 1);
  const double angle = index * std::numbers::pi / num_sensors;
  Tensor<double> out = filter_spectrum(white, [&](double fy, double fx) {
    const double r = std::hypot(fx, fy);
    if (r == 0.0) return 0.0;
    const double ring = std::exp(-0.5 * std::pow((r - radius) / kRingWidth, 2));
    const double c = std::cos(std::atan2(fy, fx) - angle);
    return ring * (0.25 + c * c);
  });
  normalize(out);
  return out;
}

int max_synthetic_mediums() { return static_cast<int>(kGratings.size()) + 1; }

Tensor<double> medium_pattern(int index, int size) {
  if (index < 0 || index >= max_synthetic_mediums()) {
    throw ValidationError("medium index " + std::to_string(index) + " outside [0, " +
                          std::to_string(max_synthetic_mediums()) + ")");
  }
  if (size < 1) throw ValidationError("pattern size must be positive");
  Tensor<double> out({size, size});
  if (index == 0) return out;
  const auto [kx, ky] = kGratings[index - 1];
  const double w = 2.0 * std::numbers::pi / 64.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) out.at(y, x) = std::cos(w * (kx * x + ky * y));
  }
  normalize(out);
  return out;
}

SyntheticNoiseSpec make_noise_spec(int num_sensors, int num_mediums, int size, double amplitude, std::uint64_t seed) {
  if (num_sensors < 1) throw ValidationError("need at least one sensor");
  if (num_mediums < 1 || num_mediums > max_synthetic_mediums()) {
    throw ValidationError("mediums must lie in [1, " + std::to_string(max_synthetic_mediums()) + "]");
  }
  SyntheticNoiseSpec spec;
  spec.amplitude = amplitude;
  spec.seed = seed;
  for (int s = 0; s < num_sensors; ++s) spec.sensor_patterns.push_back(sensor_pattern(s, num_sensors, size, seed));
  for (int m = 0; m < num_mediums; ++m) spec.medium_patterns.push_back(medium_pattern(m, size));
  spec.validate();
  return spec;
}

void SyntheticLayout::validate(int num_sensors, int num_mediums) const {
  if (videos_per_combo < 1 || frames < 1) throw ValidationError("videos per combination and frames must be positive");
  if (train_objects < 1 || train_objects > n_objects || train_backgrounds < 1 || train_backgrounds > n_backgrounds) {
    throw ValidationError("train object/background counts must lie within the pools");
  }
  if (test_period < 0) throw ValidationError("test period must be nonnegative");
  if (test_period > 0 && (train_objects == n_objects || train_backgrounds == n_backgrounds)) {
    throw ValidationError("test videos need objects and backgrounds outside the train pools");
  }
  for (const auto& [s, m] : combos) {
    if (s < 0 || s >= num_sensors || m < 0 || m >= num_mediums) {
      throw ValidationError("combination (" + std::to_string(s) + ", " + std::to_string(m) + ") out of range");
    }
  }
}

Tensor<double> render_base_texture(int size, int object_id, int background_id, int frame, std::uint64_t seed) {
  auto bg = seeded(seed, 0x4247u, static_cast<std::uint32_t>(background_id));
  std::uniform_real_distribution<double> tone(0.3, 0.7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, 3> c0{}, c1{};
  for (auto& c : c0) c = tone(bg);
  for (auto& c : c1) c = tone(bg);
  const double theta = 2.0 * std::numbers::pi * unit(bg);
  const double gx = std::cos(theta), gy = std::sin(theta);

  auto ob = seeded(seed, 0x4f424au, static_cast<std::uint32_t>(object_id));
  std::uniform_real_distribution<double> color(0.2, 0.8);
  std::array<double, 3> co{};
  for (auto& c : co) c = color(ob);
  const double rx = size * (0.15 + 0.15 * unit(ob));
  const double ry = size * (0.15 + 0.15 * unit(ob));
  const double rot = std::numbers::pi * unit(ob);
  const double cx0 = size * (0.3 + 0.4 * unit(ob));
  const double cy0 = size * (0.3 + 0.4 * unit(ob));
  const double vx = (unit(ob) - 0.5) * 0.02 * size;
  const double vy = (unit(ob) - 0.5) * 0.02 * size;
  const double cx = cx0 + vx * frame, cy = cy0 + vy * frame;
  const double cr = std::cos(rot), sr = std::sin(rot);
  const double edge = 3.0;

  Tensor<double> out({3, size, size});
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = ((x - size / 2.0) * gx + (y - size / 2.0) * gy) / size + 0.5;
      const double t = std::clamp(u, 0.0, 1.0);
      const double dx = x - cx, dy = y - cy;
      const double ex = (dx * cr + dy * sr) / rx, ey = (-dx * sr + dy * cr) / ry;
      // Signed distance to the ellipse boundary, approximately in pixels.
      const double dist = (std::sqrt(ex * ex + ey * ey) - 1.0) * std::min(rx, ry);
      const double alpha = 1.0 - smoothstep(-edge, edge, dist);
      for (int c = 0; c < 3; ++c) {
        const double back = c0[c] + (c1[c] - c0[c]) * t;
        out.at(c, y, x) = back + (co[c] - back) * alpha;
      }
    }
  }
  return out;
}

RgbImage compose_frame(const Tensor<double>& texture, const Tensor<double>& sensor, const Tensor<double>& medium,
                       double amplitude) {
  const int h = texture.dim(1), w = texture.dim(2);
  if (texture.dim(0) != 3 || sensor.shape() != Shape{h, w} || medium.shape() != Shape{h, w}) {
    throw ShapeError("compose_frame: texture and patterns disagree in size");
  }
  RgbImage image(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double noise = amplitude * sensor.at(y, x) + amplitude * medium.at(y, x);
      for (int c = 0; c < 3; ++c) image.at(y, x, c) = to_byte(texture.at(c, y, x) + noise);
    }
  }
  return image;
}

DatasetManifest generate_synthetic_dataset(const SyntheticNoiseSpec& spec, const SyntheticLayout& layout,
                                           const fs::path& out_dir) {
  spec.validate();
  const int n_c = spec.num_sensors(), n_m = spec.num_mediums(), size = spec.size();
  layout.validate(n_c, n_m);
  std::vector<std::pair<int, int>> combos = layout.combos;
  if (combos.empty()) {
    for (int s = 0; s < n_c; ++s) {
      for (int m = 0; m < n_m; ++m) combos.emplace_back(s, m);
    }
  }
  if (combos.empty()) throw ValidationError("no sensor/medium combinations requested");

  std::error_code ec;
  fs::create_directories(out_dir / "videos", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "videos").string() + ": " + ec.message());

  DatasetManifest manifest;
  manifest.n_c = n_c;
  manifest.n_m = n_m;
  manifest.metadata = {{"generator", "procedural"},
                       {"amplitude", std::to_string(spec.amplitude)},
                       {"seed", std::to_string(spec.seed)},
                       {"frame_size", std::to_string(size)}};

  for (const auto& [s, m] : combos) {
    for (int k = 0; k < layout.videos_per_combo; ++k) {
      const bool test = layout.test_period > 0 && k % layout.test_period == layout.test_period - 1;
      auto rng = seeded(spec.seed, 0x56494455u, static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(m),
                        static_cast<std::uint32_t>(k));
      std::uniform_int_distribution<int> object = test
          ? std::uniform_int_distribution<int>(layout.train_objects, layout.n_objects - 1)
          : std::uniform_int_distribution<int>(0, layout.train_objects - 1);
      std::uniform_int_distribution<int> background = test
          ? std::uniform_int_distribution<int>(layout.train_backgrounds, layout.n_backgrounds - 1)
          : std::uniform_int_distribution<int>(0, layout.train_backgrounds - 1);

      VideoRecord record;
      record.id = "s" + std::to_string(s) + "_m" + std::to_string(m) + "_v" + std::to_string(k);
      record.path = fs::absolute(out_dir / "videos" / record.id);
      record.sensor_id = s;
      record.medium_id = m;
      record.object_id = object(rng);
      record.background_id = background(rng);
      record.split = test ? Split::kTest : Split::kTrain;

      fs::create_directories(record.path, ec);
      if (ec) throw IoError("cannot create " + record.path.string() + ": " + ec.message());
      for (int f = 0; f < layout.frames; ++f) {
        const Tensor<double> texture = render_base_texture(size, record.object_id, record.background_id, f, spec.seed);
        write_png(record.path / frame_filename(f),
                  compose_frame(texture, spec.sensor_patterns[s], spec.medium_patterns[m], spec.amplitude));
      }
      manifest.records.push_back(std::move(record));
    }
  }
  save_manifest(manifest, out_dir / "manifest.jsonl");
  log::info("wrote " + std::to_string(manifest.records.size()) + " synthetic videos to " + out_dir.string());
  return manifest;
}

}  // namespace goas
