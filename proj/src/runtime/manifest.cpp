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

#include "ayc/runtime/manifest.hpp"

#include <fstream>

#include "ayc/core/error.hpp"

namespace ayc::runtime {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidManifest, "invalid manifest: " + what);
}

template <typename T>
T required(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) invalid(std::string("missing '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(std::string("wrong type for '") + key + "'");
  }
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(std::string("wrong type for '") + key + "'");
  }
}

std::array<double, 3> triple(const json& obj, const char* key, std::array<double, 3> fallback) {
  auto values = optional_field<std::vector<double>>(obj, key, {});
  if (values.empty()) return fallback;
  if (values.size() == 1) return {values[0], values[0], values[0]};
  if (values.size() != 3) invalid(std::string("'") + key + "' needs 1 or 3 entries");
  return {values[0], values[1], values[2]};
}

DecodeSpec decode_from_json(const json& d) {
  DecodeSpec spec;
  const auto variant = required<std::string>(d, "variant");
  if (variant == "combined_grid") {
    spec.variant = DecodeVariant::kCombinedGrid;
    spec.output_name = optional_field<std::string>(d, "output", spec.output_name);
    const auto layout = optional_field<std::string>(d, "layout", "channels_first");
    if (layout == "channels_first") {
      spec.layout = GridLayout::kChannelsFirst;
    } else if (layout == "anchors_first") {
      spec.layout = GridLayout::kAnchorsFirst;
    } else {
      invalid("unknown decode.layout '" + layout + "'");
    }
  } else if (variant == "triplet") {
    spec.variant = DecodeVariant::kTriplet;
    spec.boxes_name = optional_field<std::string>(d, "boxes", spec.boxes_name);
    spec.scores_name = optional_field<std::string>(d, "scores", spec.scores_name);
    spec.labels_name = optional_field<std::string>(d, "labels", spec.labels_name);
    spec.label_offset = optional_field<int>(d, "label_offset", 0);
    const auto space = optional_field<std::string>(d, "coordinate_space", "model");
    if (space == "model") {
      spec.coordinate_space = CoordinateSpace::kModelPixels;
    } else if (space == "normalized") {
      spec.coordinate_space = CoordinateSpace::kNormalized;
    } else {
      invalid("unknown decode.coordinate_space '" + space + "'");
    }
  } else {
    invalid("unknown decode.variant '" + variant + "'");
  }
  return spec;
}

json decode_to_json(const DecodeSpec& spec) {
  if (spec.variant == DecodeVariant::kCombinedGrid) {
    return {{"variant", "combined_grid"},
            {"output", spec.output_name},
            {"layout", spec.layout == GridLayout::kChannelsFirst ? "channels_first"
                                                                 : "anchors_first"}};
  }
  return {{"variant", "triplet"},
          {"boxes", spec.boxes_name},
          {"scores", spec.scores_name},
          {"labels", spec.labels_name},
          {"coordinate_space",
           spec.coordinate_space == CoordinateSpace::kModelPixels ? "model" : "normalized"},
          {"label_offset", spec.label_offset}};
}

}  // namespace

void ModelManifest::validate() const {
  if (model_id.empty()) invalid("empty model_id");
  if (input_width <= 0 || input_height <= 0) invalid("input width/height must be positive");
  if (class_names.empty()) invalid("class_names must not be empty");
  if (!(default_confidence >= 0.0 && default_confidence <= 1.0))
    invalid("defaults.confidence outside [0,1]");
  if (!(default_nms_iou >= 0.0 && default_nms_iou <= 1.0))
    invalid("defaults.nms_iou outside [0,1]");
  for (double s : normalization.scale) {
    if (!(s > 0.0)) invalid("input.scale entries must be positive");
  }
}

ModelManifest manifest_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) invalid("document is not an object");
  ModelManifest m;
  m.model_id = required<std::string>(doc, "model_id");
  m.display_name = optional_field<std::string>(doc, "display_name", m.model_id);
  std::filesystem::path file = required<std::string>(doc, "file");
  m.file_path = file.is_absolute() ? file : base_dir / file;

  const json& input = doc.contains("input") ? doc.at("input") : json();
  m.input_width = required<int>(input, "width");
  m.input_height = required<int>(input, "height");
  const auto order = optional_field<std::string>(input, "channel_order", "rgb");
  if (order == "rgb") {
    m.channel_order = ChannelOrder::kRgb;
  } else if (order == "bgr") {
    m.channel_order = ChannelOrder::kBgr;
  } else {
    invalid("unknown channel_order '" + order + "'");
  }
  m.normalization.mean = triple(input, "mean", m.normalization.mean);
  m.normalization.scale = triple(input, "scale", m.normalization.scale);

  if (!doc.contains("decode")) invalid("missing 'decode'");
  m.decode = decode_from_json(doc.at("decode"));

  m.class_names = optional_field<std::vector<std::string>>(doc, "class_names", m.class_names);
  if (doc.contains("defaults")) {
    const json& defaults = doc.at("defaults");
    m.default_confidence = optional_field<double>(defaults, "confidence", m.default_confidence);
    m.default_nms_iou = optional_field<double>(defaults, "nms_iou", m.default_nms_iou);
  }
  m.validate();
  return m;
}

json manifest_to_json(const ModelManifest& m, const std::filesystem::path& base_dir) {
  std::filesystem::path file = m.file_path;
  if (!base_dir.empty()) {
    auto rel = m.file_path.lexically_relative(base_dir);
    if (!rel.empty() && *rel.begin() != "..") file = rel;
  }
  const auto& n = m.normalization;
  return {{"model_id", m.model_id},
          {"display_name", m.display_name},
          {"file", file.generic_string()},
          {"input",
           {{"width", m.input_width},
            {"height", m.input_height},
            {"channel_order", m.channel_order == ChannelOrder::kRgb ? "rgb" : "bgr"},
            {"mean", {n.mean[0], n.mean[1], n.mean[2]}},
            {"scale", {n.scale[0], n.scale[1], n.scale[2]}}}},
          {"decode", decode_to_json(m.decode)},
          {"class_names", m.class_names},
          {"defaults", {{"confidence", m.default_confidence}, {"nms_iou", m.default_nms_iou}}}};
}

ModelManifest load_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                "manifest not found: " + manifest_path.filename().string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(std::string("not JSON: ") + e.what());
  }
  return manifest_from_json(doc, manifest_path.parent_path());
}

std::filesystem::path manifest_path_for(const std::filesystem::path& model_file) {
  auto p = model_file;
  p += ".manifest.json";
  return p;
}

}  // namespace ayc::runtime
