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
#include <utility>
#include <vector>

#include "goas/dataset.hpp"
#include "goas/tensor.hpp"

namespace goas {

// Ground-truth noise used to build a procedural dataset. Patterns are
// zero-mean H x W maps; medium 0 is the blank (live) medium and is all zero.
struct SyntheticNoiseSpec {
  std::vector<Tensor<double>> sensor_patterns;
  std::vector<Tensor<double>> medium_patterns;
  double amplitude = 0.08;
  std::uint64_t seed = 0;

  int num_sensors() const { return static_cast<int>(sensor_patterns.size()); }
  int num_mediums() const { return static_cast<int>(medium_patterns.size()); }
  int size() const { return sensor_patterns.empty() ? 0 : sensor_patterns.front().dim(0); }
  void validate() const;
};

// Band-limited random field: seeded white noise kept inside a frequency ring
// whose radius and preferred orientation depend on the sensor index.
// Normalized to zero mean and RMS 0.5.
Tensor<double> sensor_pattern(int index, int num_sensors, int size, std::uint64_t seed);

// Periodic grating with an integer number of cycles per 64 pixels, so every
// 64-pixel crop sees whole periods. Index 0 is all zero. Zero mean, RMS 0.5.
Tensor<double> medium_pattern(int index, int size);

// Largest medium index with a distinct grating.
int max_synthetic_mediums();

SyntheticNoiseSpec make_noise_spec(int num_sensors, int num_mediums, int size, double amplitude, std::uint64_t seed);

struct SyntheticLayout {
  int videos_per_combo = 2;
  int frames = 4;
  int n_objects = 24;
  int n_backgrounds = 7;
  int train_objects = 13;      // objects [0, train_objects) are train objects
  int train_backgrounds = 2;   // backgrounds [0, train_backgrounds) are train backgrounds
  int test_period = 3;         // video k of a combination is test when k % period == period - 1; 0 = all train
  std::vector<std::pair<int, int>> combos;  // (sensor, medium); empty means every combination

  void validate(int num_sensors, int num_mediums) const;
};

// 3 x size x size smooth texture in [0.2, 0.8]: a background gradient plus a
// soft-edged object that drifts with the frame index.
Tensor<double> render_base_texture(int size, int object_id, int background_id, int frame, std::uint64_t seed);

// Frame = clip(texture + a * sensor + a * medium, 0, 1), quantized to 8 bits.
RgbImage compose_frame(const Tensor<double>& texture, const Tensor<double>& sensor, const Tensor<double>& medium,
                       double amplitude);

// Writes out_dir/videos/<id>/frame_%05d.png and out_dir/manifest.jsonl.
DatasetManifest generate_synthetic_dataset(const SyntheticNoiseSpec& spec, const SyntheticLayout& layout,
                                           const std::filesystem::path& out_dir);

}  // namespace goas
