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

#include "goas/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "goas/error.hpp"
#include "goas/log.hpp"

namespace goas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Split2 {
  std::vector<double> live;
  std::vector<double> spoof;
};

Split2 partition(const std::vector<VideoScore>& scores, const char* who) {
  Split2 out;
  for (const auto& s : scores) {
    if (!std::isfinite(s.video_score)) throw ValidationError(std::string(who) + ": non-finite score for " + s.video_id);
    (s.spoof ? out.spoof : out.live).push_back(s.video_score);
  }
  if (out.live.empty() || out.spoof.empty()) {
    throw ValidationError(std::string(who) + ": needs at least one live and one spoof video");
  }
  std::sort(out.live.begin(), out.live.end());
  std::sort(out.spoof.begin(), out.spoof.end());
  return out;
}

RocPoint rates(const Split2& s, double threshold) {
  const auto live_below = std::lower_bound(s.live.begin(), s.live.end(), threshold) - s.live.begin();
  const auto spoof_below = std::lower_bound(s.spoof.begin(), s.spoof.end(), threshold) - s.spoof.begin();
  RocPoint p;
  p.threshold = threshold;
  p.frr = static_cast<double>(s.live.size() - live_below) / static_cast<double>(s.live.size());
  p.far = static_cast<double>(spoof_below) / static_cast<double>(s.spoof.size());
  return p;
}

std::vector<RocPoint> sweep(const Split2& s) {
  std::vector<double> thresholds;
  thresholds.reserve(s.live.size() + s.spoof.size() + 2);
  thresholds.push_back(-kInf);
  std::merge(s.live.begin(), s.live.end(), s.spoof.begin(), s.spoof.end(), std::back_inserter(thresholds));
  thresholds.push_back(kInf);
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RocPoint> points;
  points.reserve(thresholds.size());
  for (double t : thresholds) points.push_back(rates(s, t));
  return points;
}

// Gaps closer than this count as ties, so rounding cannot move the threshold.
constexpr double kTieTolerance = 1e-12;

EerResult eer_of(const std::vector<RocPoint>& points) {
  const RocPoint* best = &points.front();
  for (const auto& p : points) {
    if (std::abs(p.far - p.frr) < std::abs(best->far - best->frr) - kTieTolerance) best = &p;
  }
  return {(best->far + best->frr) / 2.0 * 100.0, best->threshold};
}

nlohmann::json threshold_json(double t) {
  if (t == kInf) return "inf";
  if (t == -kInf) return "-inf";
  return t;
}

double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw SchemaError("invalid threshold '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string to_string(VideoAggregation aggregation) {
  return aggregation == VideoAggregation::kVoteFraction ? "vote" : "mean";
}

VideoAggregation parse_aggregation(const std::string& name) {
  if (name == "vote") return VideoAggregation::kVoteFraction;
  if (name == "mean") return VideoAggregation::kMean;
  throw ValidationError("unknown aggregation '" + name + "' (expected vote or mean)");
}

double aggregate_patch_scores(std::span<const double> patch_scores, VideoAggregation aggregation) {
  if (patch_scores.empty()) throw ValidationError("cannot aggregate an empty list of patch scores");
  double total = 0.0;
  for (double s : patch_scores) {
    total += aggregation == VideoAggregation::kVoteFraction ? (s > 0.5 ? 1.0 : 0.0) : s;
  }
  return total / static_cast<double>(patch_scores.size());
}

VideoScore make_video_score(const std::string& id, double score, bool spoof) {
  VideoScore v;
  v.video_id = id;
  v.video_score = score;
  v.spoof = spoof;
  v.medium_id = spoof ? 1 : 0;
  return v;
}

void to_json(nlohmann::json& j, const RocPoint& p) {
  j = {{"far", p.far}, {"frr", p.frr}, {"threshold", threshold_json(p.threshold)}};
}

void from_json(const nlohmann::json& j, RocPoint& p) {
  p.far = j.at("far").get<double>();
  p.frr = j.at("frr").get<double>();
  p.threshold = threshold_from_json(j.at("threshold"));
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = {{"auc", r.auc},
       {"eer", r.eer},
       {"hter", r.hter},
       {"eer_threshold", threshold_json(r.eer_threshold)},
       {"hter_threshold", threshold_json(r.hter_threshold)},
       {"roc_points", r.roc_points},
       {"counts", {{"live", r.live_count}, {"spoof", r.spoof_count}}}};
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  try {
    r.auc = j.at("auc").get<double>();
    r.eer = j.at("eer").get<double>();
    r.hter = j.at("hter").get<double>();
    r.eer_threshold = threshold_from_json(j.at("eer_threshold"));
    r.hter_threshold = j.contains("hter_threshold") ? threshold_from_json(j.at("hter_threshold")) : r.eer_threshold;
    r.roc_points = j.at("roc_points").get<std::vector<RocPoint>>();
    r.live_count = j.at("counts").at("live").get<int>();
    r.spoof_count = j.at("counts").at("spoof").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed metrics report: ") + e.what());
  }
  auto in_range = [](double v) { return v >= 0.0 && v <= 100.0; };
  if (!in_range(r.auc) || !in_range(r.eer) || !in_range(r.hter)) {
    throw SchemaError("metrics report percentages must lie in [0, 100]");
  }
}

RocPoint error_rates(const std::vector<VideoScore>& scores, double threshold) {
  return rates(partition(scores, "error_rates"), threshold);
}

std::vector<RocPoint> compute_roc(const std::vector<VideoScore>& scores) {
  return sweep(partition(scores, "compute_roc"));
}

double compute_auc(const std::vector<VideoScore>& scores) {
  const Split2 s = partition(scores, "compute_auc");
  double total = 0.0;
  for (double v : s.spoof) {
    const auto lo = std::lower_bound(s.live.begin(), s.live.end(), v);
    const auto hi = std::upper_bound(lo, s.live.end(), v);
    total += static_cast<double>(lo - s.live.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return total / (static_cast<double>(s.live.size()) * static_cast<double>(s.spoof.size())) * 100.0;
}

EerResult compute_eer(const std::vector<VideoScore>& scores) {
  return eer_of(compute_roc(scores));
}

double compute_hter(const std::vector<VideoScore>& dev, const std::vector<VideoScore>& test) {
  const double threshold = compute_eer(dev).threshold;
  const RocPoint p = rates(partition(test, "compute_hter"), threshold);
  return (p.far + p.frr) / 2.0 * 100.0;
}

MetricsReport make_report(const std::vector<VideoScore>& dev, const std::vector<VideoScore>& test) {
  const Split2 s = partition(test, "make_report");
  MetricsReport r;
  r.roc_points = sweep(s);
  const EerResult eer = eer_of(r.roc_points);
  r.eer = eer.eer;
  r.eer_threshold = eer.threshold;
  r.auc = compute_auc(test);
  r.hter_threshold = compute_eer(dev).threshold;
  const RocPoint at = rates(s, r.hter_threshold);
  r.hter = (at.far + at.frr) / 2.0 * 100.0;
  r.live_count = static_cast<int>(s.live.size());
  r.spoof_count = static_cast<int>(s.spoof.size());
  return r;
}

std::string to_string(GroupBy group) {
  switch (group) {
    case GroupBy::kObject: return "object";
    case GroupBy::kBackground: return "background";
    case GroupBy::kSensor: return "sensor";
    case GroupBy::kMedium: return "medium";
  }
  return "?";
}

GroupBy parse_group_by(const std::string& name) {
  for (GroupBy g : {GroupBy::kObject, GroupBy::kBackground, GroupBy::kSensor, GroupBy::kMedium}) {
    if (to_string(g) == name) return g;
  }
  throw ValidationError("unknown grouping '" + name + "'");
}

std::vector<GroupReport> grouped_roc(const std::vector<VideoScore>& scores, GroupBy group_by) {
  std::map<int, std::vector<VideoScore>> groups;
  std::vector<VideoScore> lives;
  for (const auto& s : scores) {
    switch (group_by) {
      case GroupBy::kObject: groups[s.object_id].push_back(s); break;
      case GroupBy::kBackground: groups[s.background_id].push_back(s); break;
      case GroupBy::kSensor: groups[s.sensor_id].push_back(s); break;
      case GroupBy::kMedium:
        if (s.spoof) {
          groups[s.medium_id].push_back(s);
        } else {
          lives.push_back(s);
        }
        break;
    }
  }
  std::vector<GroupReport> out;
  for (auto& [key, members] : groups) {
    members.insert(members.end(), lives.begin(), lives.end());
    const std::string name = to_string(group_by) + " " + std::to_string(key);
    const bool has_live = std::any_of(members.begin(), members.end(), [](const VideoScore& v) { return !v.spoof; });
    const bool has_spoof = std::any_of(members.begin(), members.end(), [](const VideoScore& v) { return v.spoof; });
    if (!has_live || !has_spoof) {
      log::warn("skipping " + name + ": it lacks " + (has_live ? "spoof" : "live") + " videos");
      continue;
    }
    out.push_back({name, key, make_report(members, members)});
  }
  return out;
}

void to_json(nlohmann::json& j, const ConfusionReport& r) {
  j = {{"sensor", r.sensor},
       {"medium", r.medium},
       {"sensor_accuracy", r.sensor_accuracy},
       {"medium_accuracy", r.medium_accuracy},
       {"videos", r.videos}};
}

int plurality(std::span<const int> votes, int num_classes) {
  if (votes.empty()) throw ValidationError("plurality of an empty vote list");
  std::vector<int> counts(num_classes, 0);
  for (int v : votes) {
    if (v < 0 || v >= num_classes) throw ValidationError("vote outside class range");
    ++counts[v];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

ConfusionReport confusion_matrices(const std::vector<VideoPrediction>& predictions, int num_sensors, int num_mediums) {
  if (predictions.empty()) throw ValidationError("confusion matrices need at least one video");
  ConfusionReport r;
  r.sensor.assign(num_sensors, std::vector<double>(num_sensors, 0.0));
  r.medium.assign(num_mediums, std::vector<double>(num_mediums, 0.0));
  int sensor_ok = 0, medium_ok = 0;
  for (const auto& p : predictions) {
    if (p.sensor_id < 0 || p.sensor_id >= num_sensors || p.medium_id < 0 || p.medium_id >= num_mediums) {
      throw ValidationError("video " + p.video_id + " has labels outside the class range");
    }
    const int ps = plurality(p.sensor_votes, num_sensors);
    const int pm = plurality(p.medium_votes, num_mediums);
    r.sensor[p.sensor_id][ps] += 1.0;
    r.medium[p.medium_id][pm] += 1.0;
    sensor_ok += ps == p.sensor_id;
    medium_ok += pm == p.medium_id;
  }
  for (auto* m : {&r.sensor, &r.medium}) {
    for (auto& row : *m) {
      double total = 0.0;
      for (double v : row) total += v;
      if (total > 0) {
        for (double& v : row) v /= total;
      }
    }
  }
  r.videos = static_cast<int>(predictions.size());
  r.sensor_accuracy = 100.0 * sensor_ok / r.videos;
  r.medium_accuracy = 100.0 * medium_ok / r.videos;
  return r;
}

std::uint64_t stable_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::uint64_t frame_seed(std::uint64_t seed, const std::string& video_id, int frame) {
  return stable_hash(video_id + "#" + std::to_string(frame)) ^ (seed * 0x9e3779b97f4a7c15ull);
}

int argmax_row(const Tensor<float>& probs, int row) {
  int best = 0;
  for (int k = 1; k < probs.dim(1); ++k) {
    if (probs.at(row, k) > probs.at(row, best)) best = k;
  }
  return best;
}

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(0, i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(w, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

VideoEvaluation score_video(GoLab<float>& lab, const VideoRecord& record, int num_sensors, int num_mediums,
                            const ScoringOptions& options) {
  if (options.patches_per_frame < 1) throw ValidationError("patches per frame must be positive");
  const auto frames = list_frames(record);
  VideoEvaluation out;
  out.score.video_id = record.id;
  out.score.spoof = !record.is_live();
  out.score.sensor_id = record.sensor_id;
  out.score.medium_id = record.medium_id;
  out.score.object_id = record.object_id;
  out.score.background_id = record.background_id;
  out.prediction.video_id = record.id;
  out.prediction.sensor_id = record.sensor_id;
  out.prediction.medium_id = record.medium_id;
  for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
    const RgbImage frame = read_png(frames[f]);
    const PatchBatch batch = sample_patches(frame, record, num_sensors, num_mediums, options.patches_per_frame,
                                            options.patch_size, frame_seed(options.seed, record.id, f));
    const LabOutput<float> result = lab.forward(batch.images);
    for (double s : golab_spoof_score(result)) out.score.patch_scores.push_back(s);
    for (int b = 0; b < batch.size(); ++b) {
      out.prediction.sensor_votes.push_back(argmax_row(result.probs_c, b));
      out.prediction.medium_votes.push_back(argmax_row(result.probs_m, b));
    }
  }
  out.score.video_score = aggregate_patch_scores(out.score.patch_scores, options.aggregation);
  return out;
}

std::vector<VideoEvaluation> score_videos(GoLab<float>& lab, const ArchConfig& arch, const DatasetManifest& manifest,
                                          const ScoringOptions& options) {
  const int count = static_cast<int>(manifest.records.size());
  const int workers = std::max(1, std::min(options.workers, count));
  std::vector<std::unique_ptr<GoLab<float>>> copies;
  for (int w = 1; w < workers; ++w) {
    auto copy = std::make_unique<GoLab<float>>(arch, lab.num_sensors(), lab.num_mediums(), 0);
    auto src = lab.parameters();
    auto dst = copy->parameters();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i]->value = src[i]->value;
    copies.push_back(std::move(copy));
  }
  std::vector<VideoEvaluation> out(count);
  parallel_for(count, workers, [&](int w, int i) {
    GoLab<float>& model = w == 0 ? lab : *copies[w - 1];
    out[i] = score_video(model, manifest.records[i], manifest.n_c, manifest.n_m, options);
  });
  return out;
}

std::vector<VideoScore> score_videos_pad(GoPad<float>& pad, const DatasetManifest& manifest,
                                         const ScoringOptions& options) {
  std::vector<VideoScore> out;
  for (const auto& record : manifest.records) {
    VideoScore v;
    v.video_id = record.id;
    v.spoof = !record.is_live();
    v.sensor_id = record.sensor_id;
    v.medium_id = record.medium_id;
    v.object_id = record.object_id;
    v.background_id = record.background_id;
    const auto frames = list_frames(record);
    for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
      const RgbImage frame = read_png(frames[f]);
      const PatchBatch batch = sample_patches(frame, record, manifest.n_c, manifest.n_m, options.patches_per_frame,
                                              options.patch_size, frame_seed(options.seed, record.id, f));
      const Tensor<float> map = pad.forward(batch.images);
      const std::size_t per = map.stride0();
      for (int b = 0; b < batch.size(); ++b) {
        double total = 0.0;
        for (float x : map.slice0(b)) total += x;
        v.patch_scores.push_back(total / static_cast<double>(per));
      }
    }
    v.video_score = aggregate_patch_scores(v.patch_scores, options.aggregation);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace goas
