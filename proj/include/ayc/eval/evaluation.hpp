// Copyright 2026 The ayc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ayc/detection/box.hpp"

namespace ayc::eval {

using detection::BBox;
using detection::Detection;

struct GroundTruth {
  BBox box;
  int class_id = 0;
};

using ImageDetections = std::vector<Detection>;
using ImageGroundTruth = std::vector<GroundTruth>;

/// One detection after matching, in pooled evaluation order.
struct MatchedDetection {
  std::size_t image_index = 0;
  std::size_t detection_index = 0;  // position in that image's input list
  int class_id = 0;
  double confidence = 0.0;
  bool true_positive = false;
};

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gt_count = 0;
};

struct MatchResult {
  /// Sorted by confidence descending, then image index, then in-image order.
  std::vector<MatchedDetection> detections;
  std::size_t fn_count = 0;
  std::map<int, ClassCounts> per_class;

  std::size_t tp_count() const;
  std::size_t fp_count() const;
};

/// Greedy one-to-one matching, independently per image and per class.
///
/// Detections are visited by confidence descending (input order on ties).
/// Each takes the still-unmatched ground truth of its class with the highest
/// IoU >= `iou_threshold`, lower ground-truth index on ties; matched
/// detections are TP, the rest FP, and unmatched ground truths count as FN.
/// `detections` and `ground_truth` are indexed by image and must have the
/// same length.
MatchResult match_detections(std::span<const ImageDetections> detections,
                             std::span<const ImageGroundTruth> ground_truth,
                             double iou_threshold);

/// Outcome of one ranked detection.
enum class Outcome : std::uint8_t { kFalsePositive = 0, kTruePositive = 1 };

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// Cumulative (recall, precision) after each ranked detection. Recall is 0
/// when `total_gt` is 0.
std::vector<PrPoint> precision_recall(std::span<const Outcome> flags, std::size_t total_gt);

/// All-point interpolated AP: area under the precision envelope
/// p_interp(r) = max precision at recall >= r. Returns 0 when `total_gt` is 0.
double average_precision(std::span<const Outcome> flags, std::size_t total_gt);

struct LatencyStats {
  std::size_t samples = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

/// Mean and linearly interpolated percentiles.
LatencyStats latency_stats(std::span<const double> samples_ms);

struct ClassReport {
  int class_id = 0;
  std::string name;
  std::optional<double> ap;  // empty when the class has no ground truth
  ClassCounts counts;
  std::size_t detection_count = 0;
  std::vector<PrPoint> pr_points;
};

struct EvalReport {
  std::string model_id;
  double iou_threshold = 0.5;
  std::size_t image_count = 0;
  std::vector<ClassReport> classes;
  /// Unweighted mean AP over classes with at least one ground truth; 0 when
  /// no class has any.
  double map_at_50 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  /// Curve over all classes pooled by confidence.
  std::vector<PrPoint> pr_points;
  std::optional<LatencyStats> latency;

  /// class name -> AP for every class with ground truth.
  std::map<std::string, double> per_class_ap() const;
};

/// Pools matches across all images, computes AP per class and their mean.
/// Throws Error(kUnknownClassId) when a class id is outside `class_names`.
EvalReport map_at_iou(std::span<const ImageDetections> detections,
                      std::span<const ImageGroundTruth> ground_truth,
                      double iou_threshold, const std::vector<std::string>& class_names,
                      std::string model_id = {});

struct RankingRow {
  std::size_t rank = 0;
  std::string model_id;
  double map_at_50 = 0.0;
  double delta_vs_best = 0.0;  // <= 0
};

/// Descending by mAP, ties by model_id. Throws Error(kEmptyInput).
std::vector<RankingRow> compare_models(std::span<const EvalReport> reports);

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const std::vector<RankingRow>& ranking);

/// Fixed-width text rendering of a ranking, one model per line.
std::string format_ranking_table(const std::vector<RankingRow>& ranking);

}  // namespace ayc::eval
