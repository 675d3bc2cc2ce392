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

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ayc/detection/box.hpp"

namespace ayc::runtime {

enum class ChannelOrder { kRgb, kBgr };

/// Output encodings understood by the decoder.
enum class DecodeVariant {
  /// One tensor of (cx, cy, w, h, score_0 .. score_{C-1}) per candidate.
  kCombinedGrid,
  /// Separate boxes (corner coordinates), scores and labels tensors.
  kTriplet,
};

/// Axis order of a combined_grid tensor.
enum class GridLayout {
  kChannelsFirst,  // [1, 4 + C, N]
  kAnchorsFirst,   // [1, N, 4 + C]
};

/// Coordinate space of triplet boxes.
enum class CoordinateSpace {
  kModelPixels,  // letterboxed model-input pixels
  kNormalized,   // [0, 1] relative to the model input
};

struct DecodeSpec {
  DecodeVariant variant = DecodeVariant::kCombinedGrid;

  std::string output_name = "output0";
  GridLayout layout = GridLayout::kChannelsFirst;

  std::string boxes_name = "boxes";
  std::string scores_name = "scores";
  std::string labels_name = "labels";
  CoordinateSpace coordinate_space = CoordinateSpace::kModelPixels;
  // Subtracted from raw labels, e.g. 1 for exports that reserve 0 for background.
  int label_offset = 0;
};

/// Per-channel `normalized = (pixel - mean[c]) * scale[c]` over 0..255
/// pixel values, channels in model order.
struct Normalization {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0 / 255.0, 1.0 / 255.0, 1.0 / 255.0};
};

/// Everything a model file does not carry by itself.
struct ModelManifest {
  std::string model_id;
  std::string display_name;
  std::filesystem::path file_path;
  int input_width = 0;
  int input_height = 0;
  ChannelOrder channel_order = ChannelOrder::kRgb;
  Normalization normalization;
  DecodeSpec decode;
  std::vector<std::string> class_names{"chromosome"};
  double default_confidence = detection::kDefaultConfidence;
  double default_nms_iou = detection::kDefaultNmsIou;

  /// Throws Error(kInvalidManifest) when an invariant does not hold.
  void validate() const;
};

/// Parses the manifest document. A relative `file` is resolved against
/// `base_dir`. Throws Error(kInvalidManifest) on schema violations.
ModelManifest manifest_from_json(const nlohmann::json& doc,
                                 const std::filesystem::path& base_dir);

/// Serializes the manifest; `file` is written relative to `base_dir` when the
/// model lives below it.
nlohmann::json manifest_to_json(const ModelManifest& manifest,
                                const std::filesystem::path& base_dir);

ModelManifest load_manifest(const std::filesystem::path& manifest_path);

/// `<model file>.manifest.json`
std::filesystem::path manifest_path_for(const std::filesystem::path& model_file);

}  // namespace ayc::runtime
