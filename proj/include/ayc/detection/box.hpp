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

#include <span>
#include <vector>

namespace ayc::detection {

inline constexpr double kDefaultConfidence = 0.25;
inline constexpr double kDefaultNmsIou = 0.45;

/// Axis-aligned box in continuous pixel coordinates.
///
/// Area is `(x_max - x_min) * (y_max - y_min)`, no +1 pixel convention.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  BBox box;
  int class_id = 0;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Intersection over union. Returns 0 when the union has zero area.
double iou(const BBox& a, const BBox& b);

/// Detections with `confidence >= threshold`, input order preserved.
std::vector<Detection> filter_by_confidence(std::span<const Detection> dets,
                                            double threshold);

/// Greedy non-maximum suppression.
///
/// Candidates are visited by confidence descending, ties broken by smaller
/// class_id and then by input position. A candidate is kept iff its IoU with
/// every box kept so far (restricted to its own class when `per_class` is
/// set) is strictly below `iou_threshold`. The result is in visit order.
std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold,
                           bool per_class);

/// Indices of `dets` in NMS visit order.
std::vector<std::size_t> confidence_order(std::span<const Detection> dets);

}  // namespace ayc::detection
