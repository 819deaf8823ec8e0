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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "goas/dataset.hpp"
#include "goas/networks.hpp"

namespace goas {

// How patch scores become one video score.
enum class VideoAggregation {
  kVoteFraction,  // fraction of patches scoring above 0.5
  kMean,          // average patch score
};

std::string to_string(VideoAggregation aggregation);
VideoAggregation parse_aggregation(const std::string& name);

double aggregate_patch_scores(std::span<const double> patch_scores, VideoAggregation aggregation);

struct VideoScore {
  std::string video_id;
  std::vector<double> patch_scores;
  double video_score = 0.0;
  bool spoof = false;
  int sensor_id = 0;
  int medium_id = 0;
  int object_id = 0;
  int background_id = 0;
};

// Builds a score entry with only the label and video score set (for tests and tooling).
VideoScore make_video_score(const std::string& id, double score, bool spoof);

struct RocPoint {
  double far = 0.0;  // spoof videos scoring below the threshold
  double frr = 0.0;  // live videos scoring at or above the threshold
  double threshold = 0.0;
};

struct EerResult {
  double eer = 0.0;  // percent
  double threshold = 0.0;
};

struct MetricsReport {
  double auc = 0.0;  // percent
  double eer = 0.0;  // percent
  double hter = 0.0;  // percent
  double eer_threshold = 0.0;
  double hter_threshold = 0.0;
  std::vector<RocPoint> roc_points;
  int live_count = 0;
  int spoof_count = 0;
};

// Infinite thresholds are written as the strings "-inf" and "inf".
void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);
void to_json(nlohmann::json& j, const RocPoint& p);
void from_json(const nlohmann::json& j, RocPoint& p);

// Error rates at a single threshold.
RocPoint error_rates(const std::vector<VideoScore>& scores, double threshold);

// Sweep over every distinct score plus -inf and +inf, ascending thresholds.
std::vector<RocPoint> compute_roc(const std::vector<VideoScore>& scores);
// Probability that a spoof video outscores a live one, ties counted half, x100.
double compute_auc(const std::vector<VideoScore>& scores);
// Threshold minimizing |FAR - FRR|, smallest threshold on ties.
EerResult compute_eer(const std::vector<VideoScore>& scores);
// Error at the dev set's EER threshold, evaluated on the test set.
double compute_hter(const std::vector<VideoScore>& dev, const std::vector<VideoScore>& test);

// AUC, EER and ROC of `test`; HTER uses the EER threshold of `dev`.
MetricsReport make_report(const std::vector<VideoScore>& dev, const std::vector<VideoScore>& test);

enum class GroupBy { kObject, kBackground, kSensor, kMedium };

std::string to_string(GroupBy group);
GroupBy parse_group_by(const std::string& name);

struct GroupReport {
  std::string group;
  int key = 0;
  MetricsReport report;
};

// One report per group. Medium groups compare that medium's spoofs against
// every live video; groups lacking a class are skipped with a warning.
std::vector<GroupReport> grouped_roc(const std::vector<VideoScore>& scores, GroupBy group_by);

// Per-patch class predictions of one video.
struct VideoPrediction {
  std::string video_id;
  int sensor_id = 0;
  int medium_id = 0;
  std::vector<int> sensor_votes;
  std::vector<int> medium_votes;
};

struct ConfusionReport {
  std::vector<std::vector<double>> sensor;  // row = true class, row-normalized
  std::vector<std::vector<double>> medium;
  double sensor_accuracy = 0.0;  // percent
  double medium_accuracy = 0.0;  // percent
  int videos = 0;
};

void to_json(nlohmann::json& j, const ConfusionReport& r);

// Most frequent vote; the smallest class wins ties.
int plurality(std::span<const int> votes, int num_classes);

// Per-video plurality predictions aggregated into row-normalized matrices.
// Rows without any video stay all zero.
ConfusionReport confusion_matrices(const std::vector<VideoPrediction>& predictions, int num_sensors, int num_mediums);

struct ScoringOptions {
  int patches_per_frame = 20;
  int patch_size = 64;
  std::uint64_t seed = 0;
  VideoAggregation aggregation = VideoAggregation::kVoteFraction;
  int workers = 1;
};

struct VideoEvaluation {
  VideoScore score;
  VideoPrediction prediction;
};

// Samples patches from every frame and scores them with the classifier.
VideoEvaluation score_video(GoLab<float>& lab, const VideoRecord& record, int num_sensors, int num_mediums,
                            const ScoringOptions& options);

// Scores every record. With workers > 1 each worker owns a parameter copy of `lab`.
std::vector<VideoEvaluation> score_videos(GoLab<float>& lab, const ArchConfig& arch, const DatasetManifest& manifest,
                                          const ScoringOptions& options);

// Same protocol for the binary baseline: a patch's score is its mean map value.
std::vector<VideoScore> score_videos_pad(GoPad<float>& pad, const DatasetManifest& manifest,
                                         const ScoringOptions& options);

// Stable 64-bit hash used to derive per-video seeds.
std::uint64_t stable_hash(const std::string& text);

}  // namespace goas
