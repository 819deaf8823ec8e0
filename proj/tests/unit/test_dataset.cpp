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

#include <fstream>
#include <set>

#include "goas/dataset.hpp"
#include "goas/error.hpp"
#include "goas/log.hpp"
#include "goas/synthetic.hpp"
#include "test_support.hpp"

namespace goas {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::vector<std::uint8_t> file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// Captures warnings for the lifetime of the object.
struct WarningCapture {
  std::vector<std::string> messages;
  log::Sink previous;
  WarningCapture() {
    previous = log::set_sink([this](log::Level level, const std::string& m) {
      if (level == log::Level::kWarning) messages.push_back(m);
    });
  }
  ~WarningCapture() { log::set_sink(previous); }
};

TEST(Manifest, RoundTripTwoRecords) {
  TempDir dir;
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  write_text(dir / "m.jsonl",
             "{\"n_c\":7,\"n_m\":7}\n"
             "{\"id\":\"a\",\"path\":\"a\",\"sensor_id\":1,\"medium_id\":0,\"object_id\":3,\"background_id\":0,"
             "\"split\":\"train\"}\n"
             "{\"id\":\"b\",\"path\":\"b\",\"sensor_id\":6,\"medium_id\":6,\"object_id\":20,\"background_id\":5,"
             "\"split\":\"test\"}\n");
  const DatasetManifest m = load_manifest(dir / "m.jsonl");
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.n_c, 7);
  EXPECT_EQ(m.records[1].split, Split::kTest);
  EXPECT_EQ(m.records[0].path, dir / "a");
  EXPECT_TRUE(m.records[0].is_live());

  save_manifest(m, dir / "copy.jsonl");
  const DatasetManifest back = load_manifest(dir / "copy.jsonl");
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[1].id, "b");
  EXPECT_EQ(back.records[1].medium_id, 6);
  EXPECT_EQ(back.records[1].path, dir / "b");
}

TEST(Manifest, OutOfRangeMediumNamesRecord) {
  TempDir dir;
  fs::create_directories(dir / "x");
  write_text(dir / "m.jsonl",
             "{\"n_c\":7,\"n_m\":7}\n"
             "{\"id\":\"bad_video\",\"path\":\"x\",\"sensor_id\":1,\"medium_id\":9,\"object_id\":0,"
             "\"background_id\":0,\"split\":\"train\"}\n");
  try {
    load_manifest(dir / "m.jsonl");
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("bad_video"), std::string::npos);
  }
}

TEST(Manifest, EmptyManifestWarns) {
  TempDir dir;
  write_text(dir / "m.jsonl", "{\"n_c\":2,\"n_m\":2}\n");
  WarningCapture capture;
  const DatasetManifest m = load_manifest(dir / "m.jsonl");
  EXPECT_TRUE(m.records.empty());
  EXPECT_FALSE(capture.messages.empty());
}

TEST(Manifest, SchemaViolations) {
  TempDir dir;
  fs::create_directories(dir / "x");
  const std::string header = "{\"n_c\":2,\"n_m\":2}\n";
  const std::string rec = "{\"id\":\"v\",\"path\":\"x\",\"sensor_id\":0,\"medium_id\":0,\"object_id\":0,"
                          "\"background_id\":0,\"split\":\"train\"";
  write_text(dir / "dup.jsonl", header + rec + "}\n" + rec + "}\n");
  EXPECT_THROW(load_manifest(dir / "dup.jsonl"), SchemaError);
  write_text(dir / "extra.jsonl", header + rec + ",\"color\":1}\n");
  EXPECT_THROW(load_manifest(dir / "extra.jsonl"), SchemaError);
  write_text(dir / "split.jsonl", header + "{\"id\":\"v\",\"path\":\"x\",\"sensor_id\":0,\"medium_id\":0,"
                                           "\"object_id\":0,\"background_id\":0,\"split\":\"dev\"}\n");
  EXPECT_THROW(load_manifest(dir / "split.jsonl"), ValidationError);
  write_text(dir / "path.jsonl", header + "{\"id\":\"v\",\"path\":\"missing\",\"sensor_id\":0,\"medium_id\":0,"
                                          "\"object_id\":0,\"background_id\":0,\"split\":\"train\"}\n");
  EXPECT_THROW(load_manifest(dir / "path.jsonl"), SchemaError);
  write_text(dir / "broken.jsonl", header + "{not json\n");
  EXPECT_THROW(load_manifest(dir / "broken.jsonl"), SchemaError);
  EXPECT_THROW(load_manifest(dir / "absent.jsonl"), IoError);
}

TEST(Synthetic, CountsFramesAndLabels) {
  TempDir dir;
  SyntheticLayout layout;
  layout.videos_per_combo = 2;
  layout.frames = 4;
  const DatasetManifest m = generate_synthetic_dataset(make_noise_spec(3, 3, 64, 0.08, 1), layout, dir.path());
  EXPECT_EQ(m.records.size(), 18u);
  int frames = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "videos")) {
    frames += entry.path().extension() == ".png";
  }
  EXPECT_EQ(frames, 72);
  const DatasetManifest loaded = load_manifest(dir / "manifest.jsonl");
  EXPECT_EQ(loaded.records.size(), 18u);
  EXPECT_EQ(loaded.n_c, 3);
  EXPECT_EQ(loaded.n_m, 3);
  std::set<std::pair<int, int>> combos;
  for (const auto& r : loaded.records) combos.insert({r.sensor_id, r.medium_id});
  EXPECT_EQ(combos.size(), 9u);
  EXPECT_EQ(list_frames(loaded.records[0]).size(), 4u);
  EXPECT_EQ(list_frames(loaded.records[0])[0].filename(), "frame_00000.png");
}

TEST(Synthetic, ZeroAmplitudeEqualsBaseTexture) {
  TempDir dir;
  SyntheticLayout layout;
  layout.videos_per_combo = 1;
  layout.frames = 2;
  layout.test_period = 0;
  const auto spec = make_noise_spec(2, 2, 32, 0.0, 5);
  const DatasetManifest m = generate_synthetic_dataset(spec, layout, dir.path());
  for (const auto& r : m.records) {
    for (int f = 0; f < 2; ++f) {
      const RgbImage frame = load_frame(r, f);
      const Tensor<double> texture = render_base_texture(32, r.object_id, r.background_id, f, spec.seed);
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
          for (int c = 0; c < 3; ++c) ASSERT_EQ(frame.at(y, x, c), to_byte(texture.at(c, y, x)));
        }
      }
    }
  }
}

TEST(Synthetic, SameSeedIsByteIdentical) {
  TempDir a, b;
  SyntheticLayout layout;
  layout.videos_per_combo = 2;
  layout.frames = 2;
  generate_synthetic_dataset(make_noise_spec(2, 3, 32, 0.08, 9), layout, a.path());
  generate_synthetic_dataset(make_noise_spec(2, 3, 32, 0.08, 9), layout, b.path());
  EXPECT_EQ(file_bytes(a / "manifest.jsonl"), file_bytes(b / "manifest.jsonl"));
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a / "videos")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a.path());
    EXPECT_EQ(file_bytes(entry.path()), file_bytes(b.path() / rel)) << rel;
    ++compared;
  }
  EXPECT_EQ(compared, 2 * 3 * 2 * 2);
}

TEST(Synthetic, NoiseKeepsMeanWithinAmplitude) {
  const double a = 0.08;
  const auto spec = make_noise_spec(3, 3, 64, a, 2);
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      const Tensor<double> texture = render_base_texture(64, s + 2, m, 1, 2);
      const RgbImage frame = compose_frame(texture, spec.sensor_patterns[s], spec.medium_patterns[m], a);
      double noisy = 0.0, base = 0.0;
      for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < 64; ++y) {
          for (int x = 0; x < 64; ++x) {
            noisy += frame.at(y, x, c) / 255.0;
            base += texture.at(c, y, x);
          }
        }
      }
      EXPECT_LE(std::abs(noisy - base) / (3 * 64 * 64), a);
    }
  }
}

TEST(Synthetic, PatternsAreZeroMeanAndSeparable) {
  const auto spec = make_noise_spec(3, 4, 64, 0.08, 3);
  EXPECT_NO_THROW(spec.validate());
  for (double v : spec.medium_patterns[0].values()) EXPECT_EQ(v, 0.0);
  for (int i = 1; i < 4; ++i) {
    double sq = 0.0;
    for (double v : spec.medium_patterns[i].values()) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq / 4096.0), 0.5, 1e-9);
  }
  SyntheticNoiseSpec bad = spec;
  bad.amplitude = 0.9;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = spec;
  bad.medium_patterns[0] = spec.medium_patterns[1];
  EXPECT_THROW(bad.validate(), ValidationError);
  EXPECT_THROW(make_noise_spec(2, max_synthetic_mediums() + 1, 64, 0.08, 1), ValidationError);
}

TEST(Patches, LargeFrameTwentyPatchesInBounds) {
  RgbImage frame(1080, 1920);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) frame.pixels[i] = static_cast<std::uint8_t>(i * 31 % 251);
  VideoRecord record;
  record.id = "v";
  record.sensor_id = 2;
  record.medium_id = 1;
  const PatchBatch batch = sample_patches(frame, record, 3, 3, 20, 64, 7);
  EXPECT_EQ(batch.images.shape(), (Shape{20, 3, 64, 64}));
  for (int b = 0; b < 20; ++b) {
    EXPECT_EQ(batch.sensor_onehot.at(b, 2), 1.0f);
    EXPECT_EQ(batch.medium_onehot.at(b, 1), 1.0f);
  }
  for (const auto& c : patch_corners(1080, 1920, 20, 64, 7)) {
    EXPECT_GE(c.top, 0);
    EXPECT_GE(c.left, 0);
    EXPECT_LE(c.top + 64, 1080);
    EXPECT_LE(c.left + 64, 1920);
  }
}

TEST(Patches, ExactSizeFrameGivesIdenticalPatches) {
  RgbImage frame(64, 64);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) frame.pixels[i] = static_cast<std::uint8_t>(i % 256);
  VideoRecord record;
  record.id = "v";
  const PatchBatch batch = sample_patches(frame, record, 1, 2, 20, 64, 3);
  const auto first = batch.images.slice0(0);
  for (int b = 1; b < 20; ++b) {
    const auto other = batch.images.slice0(b);
    EXPECT_TRUE(std::equal(first.begin(), first.end(), other.begin()));
  }
  EXPECT_FLOAT_EQ(batch.images.at(0, 0, 0, 1), 3.0f / 255.0f);
}

TEST(Patches, SeedDeterminesCorners) {
  EXPECT_EQ(patch_corners(300, 500, 20, 64, 11), patch_corners(300, 500, 20, 64, 11));
  EXPECT_NE(patch_corners(300, 500, 20, 64, 11), patch_corners(300, 500, 20, 64, 12));
  EXPECT_THROW(patch_corners(63, 500, 1, 64, 1), ValidationError);
}

TEST(Patches, FuzzNeverLeavesFrame) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(16, 200);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = dim(rng), w = dim(rng), size = std::min({h, w, 16 + trial % 40});
    for (const auto& c : patch_corners(h, w, 10, size, trial)) {
      ASSERT_GE(c.top, 0);
      ASSERT_GE(c.left, 0);
      ASSERT_LE(c.top + size, h);
      ASSERT_LE(c.left + size, w);
    }
  }
}

DatasetManifest grid_manifest(int objects, int backgrounds) {
  DatasetManifest m;
  m.n_c = 1;
  m.n_m = 2;
  for (int o = 0; o < objects; ++o) {
    for (int b = 0; b < backgrounds; ++b) {
      VideoRecord r;
      r.id = "o" + std::to_string(o) + "_b" + std::to_string(b);
      r.object_id = o;
      r.background_id = b;
      r.medium_id = (o + b) % 2;
      m.records.push_back(r);
    }
  }
  return m;
}

TEST(Split, HeldOutObjectsAndBackgrounds) {
  const DatasetManifest m = grid_manifest(24, 7);
  std::set<int> objects, backgrounds{0, 1};
  for (int o = 0; o < 13; ++o) objects.insert(o);
  WarningCapture capture;
  const SplitResult r = split_by_rule(m, objects, backgrounds);
  EXPECT_EQ(r.manifest.count(Split::kTrain), 13u * 2u);
  EXPECT_EQ(r.manifest.count(Split::kTest), 11u * 5u);
  EXPECT_EQ(r.excluded.size(), 24u * 7u - 26u - 55u);
  std::set<int> train_obj, test_obj, train_bg, test_bg;
  for (const auto& rec : r.manifest.records) {
    (rec.split == Split::kTrain ? train_obj : test_obj).insert(rec.object_id);
    (rec.split == Split::kTrain ? train_bg : test_bg).insert(rec.background_id);
  }
  for (int o : train_obj) EXPECT_EQ(test_obj.count(o), 0u);
  for (int b : train_bg) EXPECT_EQ(test_bg.count(b), 0u);
}

TEST(Split, MixedRecordExcludedAndReported) {
  const DatasetManifest m = grid_manifest(2, 2);
  WarningCapture capture;
  const SplitResult r = split_by_rule(m, {0}, {0});
  EXPECT_EQ(r.excluded.size(), 2u);
  EXPECT_NE(std::find(r.excluded.begin(), r.excluded.end(), "o0_b1"), r.excluded.end());
  EXPECT_FALSE(capture.messages.empty());
}

TEST(Split, AllObjectsInTrainIsError) {
  const DatasetManifest m = grid_manifest(3, 3);
  EXPECT_THROW(split_by_rule(m, {0, 1, 2}, {0, 1, 2}), ValidationError);
}

TEST(Dataset, SelectSplitAndFrameStore) {
  TempDir dir;
  const DatasetManifest m = testing::small_synthetic_dataset(dir.path());
  const DatasetManifest train = select_split(m, Split::kTrain);
  for (const auto& r : train.records) EXPECT_EQ(r.split, Split::kTrain);
  EXPECT_EQ(train.records.size() + select_split(m, Split::kTest).records.size(), m.records.size());
  const FrameStore store(train);
  EXPECT_EQ(store.frame_count(train.records[0].id), 2u);
  EXPECT_THROW(store.frames("nope"), ValidationError);
}

}  // namespace
}  // namespace goas
