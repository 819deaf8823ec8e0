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
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "goas/image_io.hpp"
#include "goas/tensor.hpp"

namespace goas {

enum class Split { kTrain, kTest };

std::string to_string(Split split);
Split parse_split(const std::string& name);

// One captured video, stored as a directory of frame_%05d.png files.
struct VideoRecord {
  std::string id;
  std::filesystem::path path;  // absolute once loaded
  int sensor_id = 0;
  int medium_id = 0;  // 0 is the live (blank) medium
  int object_id = 0;
  int background_id = 0;
  Split split = Split::kTrain;

  bool is_live() const { return medium_id == 0; }
};

struct DatasetManifest {
  std::vector<VideoRecord> records;
  int n_c = 0;  // number of sensors
  int n_m = 0;  // number of mediums, live included
  std::map<std::string, std::string> metadata;

  // Throws SchemaError naming the first offending record.
  void validate(bool check_paths) const;
  std::size_t count(Split split) const;
};

// Line-oriented JSON: a {"n_c":..,"n_m":..} header, then one record per line.
// Record paths are resolved relative to the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
// Paths under the manifest's directory are written relative to it.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

std::string frame_filename(int index);
// Sorted frame files of a record; throws IoError when none exist.
std::vector<std::filesystem::path> list_frames(const VideoRecord& record);
RgbImage load_frame(const VideoRecord& record, int frame_index);

// Fixed-size patches with their conditioning labels. images is B x 3 x S x S
// in [0,1]; one-hot rows are B x n_c and B x n_m.
struct PatchBatch {
  Tensor<float> images;
  Tensor<float> sensor_onehot;
  Tensor<float> medium_onehot;
  std::vector<std::string> source_video_ids;

  int size() const { return images.empty() ? 0 : images.dim(0); }
  void append(const PatchBatch& other);
};

PatchBatch make_patch_batch(int count, int patch_size, int n_c, int n_m);

// Rows of `batch` in the given order (indices may repeat).
PatchBatch select_patches(const PatchBatch& batch, const std::vector<int>& indices);

// Writes a crop of `frame` at (top, left) into slot `index` of the batch and
// sets its labels.
void put_patch(PatchBatch& batch, int index, const RgbImage& frame, int top, int left, int sensor_id, int medium_id,
               const std::string& video_id);

struct PatchCorner {
  int top = 0;
  int left = 0;
  friend bool operator==(const PatchCorner&, const PatchCorner&) = default;
};

// Uniform top-left corners of `count` crops that fit inside the frame.
std::vector<PatchCorner> patch_corners(int frame_height, int frame_width, int count, int size, std::uint64_t seed);

PatchBatch sample_patches(const RgbImage& frame, const VideoRecord& record, int n_c, int n_m, int count, int size,
                          std::uint64_t seed);
PatchBatch sample_patches(const VideoRecord& record, int n_c, int n_m, int frame_index, int count, int size,
                          std::uint64_t seed);

struct SplitResult {
  DatasetManifest manifest;
  std::vector<std::string> excluded;  // records with mixed train/test membership
};

// Train = object and background both in the train sets; test = both outside;
// anything else is excluded and reported.
SplitResult split_by_rule(const DatasetManifest& manifest, const std::set<int>& train_objects,
                          const std::set<int>& train_backgrounds);

DatasetManifest select_split(const DatasetManifest& manifest, Split split);

// In-memory frames for a manifest, shared read-only between samplers.
class FrameStore {
 public:
  explicit FrameStore(const DatasetManifest& manifest);

  const std::vector<RgbImage>& frames(const std::string& video_id) const;
  std::size_t frame_count(const std::string& video_id) const { return frames(video_id).size(); }

 private:
  std::unordered_map<std::string, std::vector<RgbImage>> frames_;
};

}  // namespace goas
