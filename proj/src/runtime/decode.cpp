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

#include "ayc/runtime/decode.hpp"

#include <algorithm>
#include <cmath>

#include "ayc/core/error.hpp"

namespace ayc::runtime {
namespace {

using detection::BBox;
using detection::Detection;

[[noreturn]] void shape_mismatch(const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, what);
}

const Tensor& output(const TensorMap& outputs, const std::string& name) {
  auto it = outputs.find(name);
  if (it == outputs.end()) shape_mismatch("missing model output '" + name + "'");
  if (static_cast<std::int64_t>(it->second.data.size()) != it->second.element_count())
    shape_mismatch("output '" + name + "' data does not match its shape");
  return it->second;
}

// Drops leading unit (batch) axes down to `rank`.
std::vector<std::int64_t> squeeze_to(const Tensor& t, std::size_t rank, const std::string& name) {
  std::vector<std::int64_t> dims = t.shape;
  while (dims.size() > rank && dims.front() == 1) dims.erase(dims.begin());
  if (dims.size() != rank)
    shape_mismatch("output '" + name + "' has unexpected rank " + std::to_string(t.shape.size()));
  return dims;
}

double clamp_confidence(double c) {
  if (std::isnan(c)) return 0.0;
  return std::clamp(c, 0.0, 1.0);
}

std::vector<Detection> decode_grid(const TensorMap& outputs, const DecodeSpec& spec,
                                   const PreprocessTransform& t, std::size_t num_classes) {
  const Tensor& raw = output(outputs, spec.output_name);
  const auto dims = squeeze_to(raw, 2, spec.output_name);
  const bool channels_first = spec.layout == GridLayout::kChannelsFirst;
  const auto channels = static_cast<std::size_t>(channels_first ? dims[0] : dims[1]);
  const auto candidates = static_cast<std::size_t>(channels_first ? dims[1] : dims[0]);
  if (channels != 4 + num_classes) {
    shape_mismatch("combined_grid output has " + std::to_string(channels) +
                   " channels, expected 4 + " + std::to_string(num_classes));
  }
  auto at = [&](std::size_t channel, std::size_t anchor) -> double {
    return channels_first ? raw.data[channel * candidates + anchor]
                          : raw.data[anchor * channels + channel];
  };

  std::vector<Detection> dets;
  dets.reserve(candidates);
  for (std::size_t a = 0; a < candidates; ++a) {
    std::size_t best = 0;
    double best_score = at(4, a);
    for (std::size_t c = 1; c < num_classes; ++c) {
      const double s = at(4 + c, a);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    const double cx = at(0, a), cy = at(1, a);
    const double hw = at(2, a) / 2.0, hh = at(3, a) / 2.0;
    dets.push_back({t.to_original({cx - hw, cy - hh, cx + hw, cy + hh}),
                    static_cast<int>(best), clamp_confidence(best_score)});
  }
  return dets;
}

std::vector<Detection> decode_triplet(const TensorMap& outputs, const DecodeSpec& spec,
                                      const PreprocessTransform& t, std::size_t num_classes) {
  const Tensor& boxes = output(outputs, spec.boxes_name);
  const Tensor& scores = output(outputs, spec.scores_name);
  const Tensor& labels = output(outputs, spec.labels_name);
  const auto box_dims = squeeze_to(boxes, 2, spec.boxes_name);
  if (box_dims[1] != 4) shape_mismatch("triplet boxes must have 4 coordinates per row");
  const auto n = static_cast<std::size_t>(box_dims[0]);
  if (scores.data.size() != n || labels.data.size() != n) {
    shape_mismatch("triplet outputs disagree on detection count");
  }
  const double sx = spec.coordinate_space == CoordinateSpace::kNormalized ? t.model_width : 1.0;
  const double sy = spec.coordinate_space == CoordinateSpace::kNormalized ? t.model_height : 1.0;

  std::vector<Detection> dets;
  dets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float* row = &boxes.data[4 * i];
    const long label = std::lround(labels.data[i]) - spec.label_offset;
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      shape_mismatch("triplet label " + std::to_string(label) + " outside the class list");
    }
    BBox model_box{row[0] * sx, row[1] * sy, row[2] * sx, row[3] * sy};
    dets.push_back({t.to_original(model_box), static_cast<int>(label),
                    clamp_confidence(scores.data[i])});
  }
  return dets;
}

}  // namespace

std::vector<Detection> decode_output(const TensorMap& outputs, const DecodeSpec& spec,
                                     const PreprocessTransform& transform,
                                     std::size_t num_classes) {
  if (num_classes == 0) shape_mismatch("class list is empty");
  if (spec.variant == DecodeVariant::kCombinedGrid) {
    return decode_grid(outputs, spec, transform, num_classes);
  }
  return decode_triplet(outputs, spec, transform, num_classes);
}

}  // namespace ayc::runtime
