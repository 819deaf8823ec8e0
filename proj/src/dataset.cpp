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

#include "goas/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "goas/log.hpp"

namespace goas {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split '" + name + "' (expected train or test)");
}

void DatasetManifest::validate(bool check_paths) const {
  if (n_c < 1 || n_m < 1) throw SchemaError("manifest header needs n_c >= 1 and n_m >= 1");
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    const std::string where = "record '" + r.id + "'";
    if (r.id.empty()) throw SchemaError("record with empty id");
    if (!seen.insert(r.id).second) throw SchemaError(where + ": duplicate id");
    if (r.sensor_id < 0 || r.sensor_id >= n_c) {
      throw SchemaError(where + ": sensor_id " + std::to_string(r.sensor_id) + " outside [0, " + std::to_string(n_c) + ")");
    }
    if (r.medium_id < 0 || r.medium_id >= n_m) {
      throw SchemaError(where + ": medium_id " + std::to_string(r.medium_id) + " outside [0, " + std::to_string(n_m) + ")");
    }
    if (r.object_id < 0 || r.background_id < 0) throw SchemaError(where + ": negative object/background id");
    if (check_paths && !fs::exists(r.path)) throw SchemaError(where + ": path " + r.path.string() + " does not exist");
  }
}

std::size_t DatasetManifest::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [split](const VideoRecord& r) { return r.split == split; }));
}

namespace {

template <typename V>
V required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<V>();
  } catch (const json::exception&) {
    throw SchemaError(where + ": field '" + key + "' has the wrong type");
  }
}

VideoRecord parse_record(const json& j, const fs::path& base, int line) {
  const std::string where = "manifest line " + std::to_string(line);
  if (!j.is_object()) throw SchemaError(where + ": record is not an object");
  static const std::set<std::string> known = {"id", "path", "sensor_id", "medium_id", "object_id", "background_id", "split"};
  VideoRecord r;
  r.id = required<std::string>(j, "id", where);
  const std::string rec = "record '" + r.id + "'";
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw SchemaError(rec + ": unknown field '" + item.key() + "'");
  }
  const fs::path path = required<std::string>(j, "path", rec);
  r.path = path.is_absolute() ? path : (base / path).lexically_normal();
  r.sensor_id = required<int>(j, "sensor_id", rec);
  r.medium_id = required<int>(j, "medium_id", rec);
  r.object_id = required<int>(j, "object_id", rec);
  r.background_id = required<int>(j, "background_id", rec);
  try {
    r.split = parse_split(required<std::string>(j, "split", rec));
  } catch (const SchemaError&) {
    throw;
  } catch (const ValidationError& e) {
    throw SchemaError(rec + ": " + e.what());
  }
  return r;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError("manifest line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!header) {
      const std::string where = "manifest header";
      manifest.n_c = required<int>(j, "n_c", where);
      manifest.n_m = required<int>(j, "n_m", where);
      if (j.contains("metadata")) {
        for (const auto& item : j.at("metadata").items()) {
          manifest.metadata[item.key()] = item.value().is_string() ? item.value().get<std::string>() : item.value().dump();
        }
      }
      header = true;
      continue;
    }
    manifest.records.push_back(parse_record(j, base, line_no));
  }
  if (!header) throw SchemaError("manifest " + path.string() + " has no header line");
  manifest.validate(true);
  if (manifest.records.empty()) log::warn("manifest " + path.string() + " contains no records");
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  manifest.validate(false);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  json header = {{"n_c", manifest.n_c}, {"n_m", manifest.n_m}};
  if (!manifest.metadata.empty()) header["metadata"] = manifest.metadata;
  out << header.dump() << '\n';
  for (const auto& r : manifest.records) {
    fs::path p = r.path;
    if (p.is_absolute()) {
      const fs::path rel = fs::absolute(p).lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    json j = {{"id", r.id},
              {"path", p.generic_string()},
              {"sensor_id", r.sensor_id},
              {"medium_id", r.medium_id},
              {"object_id", r.object_id},
              {"background_id", r.background_id},
              {"split", to_string(r.split)}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing manifest " + path.string());
}

std::string frame_filename(int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%05d.png", index);
  return name;
}

std::vector<fs::path> list_frames(const VideoRecord& record) {
  std::vector<fs::path> frames;
  if (fs::is_directory(record.path)) {
    for (const auto& entry : fs::directory_iterator(record.path)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".png") frames.push_back(entry.path());
    }
  } else if (fs::is_regular_file(record.path) && record.path.extension() == ".png") {
    frames.push_back(record.path);
  }
  if (frames.empty()) throw IoError("record '" + record.id + "' has no frames under " + record.path.string());
  std::sort(frames.begin(), frames.end());
  return frames;
}

RgbImage load_frame(const VideoRecord& record, int frame_index) {
  const auto frames = list_frames(record);
  if (frame_index < 0 || frame_index >= static_cast<int>(frames.size())) {
    throw ValidationError("record '" + record.id + "' has no frame " + std::to_string(frame_index));
  }
  return read_png(frames[frame_index]);
}

void PatchBatch::append(const PatchBatch& other) {
  if (other.size() == 0) return;
  if (size() == 0) {
    *this = other;
    return;
  }
  images = concat0(images, other.images);
  sensor_onehot = concat0(sensor_onehot, other.sensor_onehot);
  medium_onehot = concat0(medium_onehot, other.medium_onehot);
  source_video_ids.insert(source_video_ids.end(), other.source_video_ids.begin(), other.source_video_ids.end());
}

PatchBatch make_patch_batch(int count, int patch_size, int n_c, int n_m) {
  PatchBatch batch;
  batch.images = Tensor<float>({count, 3, patch_size, patch_size});
  batch.sensor_onehot = Tensor<float>({count, n_c});
  batch.medium_onehot = Tensor<float>({count, n_m});
  batch.source_video_ids.resize(count);
  return batch;
}

PatchBatch select_patches(const PatchBatch& batch, const std::vector<int>& indices) {
  const int count = static_cast<int>(indices.size());
  PatchBatch out = make_patch_batch(count, batch.images.dim(2), batch.sensor_onehot.dim(1), batch.medium_onehot.dim(1));
  for (int i = 0; i < count; ++i) {
    const int j = indices[i];
    if (j < 0 || j >= batch.size()) throw ValidationError("patch index " + std::to_string(j) + " out of range");
    std::copy_n(batch.images.slice0(j).begin(), batch.images.stride0(), out.images.slice0(i).begin());
    std::copy_n(batch.sensor_onehot.slice0(j).begin(), batch.sensor_onehot.stride0(), out.sensor_onehot.slice0(i).begin());
    std::copy_n(batch.medium_onehot.slice0(j).begin(), batch.medium_onehot.stride0(), out.medium_onehot.slice0(i).begin());
    out.source_video_ids[i] = batch.source_video_ids[j];
  }
  return out;
}

void put_patch(PatchBatch& batch, int index, const RgbImage& frame, int top, int left, int sensor_id, int medium_id,
               const std::string& video_id) {
  const int size = batch.images.dim(2);
  if (top < 0 || left < 0 || top + size > frame.height || left + size > frame.width) {
    throw ValidationError("patch at (" + std::to_string(top) + ", " + std::to_string(left) + ") exceeds frame");
  }
  constexpr float kScale = 1.0f / 255.0f;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < size; ++y) {
      float* dst = &batch.images.at(index, c, y, 0);
      for (int x = 0; x < size; ++x) dst[x] = frame.at(top + y, left + x, c) * kScale;
    }
  }
  auto sensor = batch.sensor_onehot.slice0(index);
  auto medium = batch.medium_onehot.slice0(index);
  std::fill(sensor.begin(), sensor.end(), 0.0f);
  std::fill(medium.begin(), medium.end(), 0.0f);
  sensor[sensor_id] = 1.0f;
  medium[medium_id] = 1.0f;
  batch.source_video_ids[index] = video_id;
}

std::vector<PatchCorner> patch_corners(int frame_height, int frame_width, int count, int size, std::uint64_t seed) {
  if (size < 1 || count < 0) throw ValidationError("patch size must be positive and count nonnegative");
  if (size > frame_height || size > frame_width) {
    throw ValidationError("frame " + std::to_string(frame_height) + "x" + std::to_string(frame_width) +
                          " is smaller than patch size " + std::to_string(size));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> top(0, frame_height - size);
  std::uniform_int_distribution<int> left(0, frame_width - size);
  std::vector<PatchCorner> corners(count);
  for (auto& c : corners) {
    c.top = top(rng);
    c.left = left(rng);
  }
  return corners;
}

PatchBatch sample_patches(const RgbImage& frame, const VideoRecord& record, int n_c, int n_m, int count, int size,
                          std::uint64_t seed) {
  const auto corners = patch_corners(frame.height, frame.width, count, size, seed);
  PatchBatch batch = make_patch_batch(count, size, n_c, n_m);
  for (int i = 0; i < count; ++i) {
    put_patch(batch, i, frame, corners[i].top, corners[i].left, record.sensor_id, record.medium_id, record.id);
  }
  return batch;
}

PatchBatch sample_patches(const VideoRecord& record, int n_c, int n_m, int frame_index, int count, int size,
                          std::uint64_t seed) {
  return sample_patches(load_frame(record, frame_index), record, n_c, n_m, count, size, seed);
}

SplitResult split_by_rule(const DatasetManifest& manifest, const std::set<int>& train_objects,
                          const std::set<int>& train_backgrounds) {
  if (train_objects.empty() || train_backgrounds.empty()) {
    throw ValidationError("split_by_rule needs non-empty train object and background sets");
  }
  SplitResult result;
  result.manifest.n_c = manifest.n_c;
  result.manifest.n_m = manifest.n_m;
  result.manifest.metadata = manifest.metadata;
  for (const auto& r : manifest.records) {
    const bool obj_train = train_objects.count(r.object_id) > 0;
    const bool bg_train = train_backgrounds.count(r.background_id) > 0;
    if (obj_train != bg_train) {
      result.excluded.push_back(r.id);
      continue;
    }
    VideoRecord copy = r;
    copy.split = obj_train ? Split::kTrain : Split::kTest;
    result.manifest.records.push_back(std::move(copy));
  }
  if (result.manifest.count(Split::kTrain) == 0) throw ValidationError("split_by_rule: train split is empty");
  if (result.manifest.count(Split::kTest) == 0) throw ValidationError("split_by_rule: test split is empty");
  if (!result.excluded.empty()) {
    log::warn("split_by_rule excluded " + std::to_string(result.excluded.size()) +
              " record(s) with mixed train/test object and background");
  }
  return result;
}

DatasetManifest select_split(const DatasetManifest& manifest, Split split) {
  DatasetManifest out;
  out.n_c = manifest.n_c;
  out.n_m = manifest.n_m;
  out.metadata = manifest.metadata;
  for (const auto& r : manifest.records) {
    if (r.split == split) out.records.push_back(r);
  }
  return out;
}

FrameStore::FrameStore(const DatasetManifest& manifest) {
  for (const auto& r : manifest.records) {
    std::vector<RgbImage> frames;
    for (const auto& path : list_frames(r)) frames.push_back(read_png(path));
    frames_.emplace(r.id, std::move(frames));
  }
}

const std::vector<RgbImage>& FrameStore::frames(const std::string& video_id) const {
  const auto it = frames_.find(video_id);
  if (it == frames_.end()) throw ValidationError("frame store has no video '" + video_id + "'");
  return it->second;
}

}  // namespace goas
