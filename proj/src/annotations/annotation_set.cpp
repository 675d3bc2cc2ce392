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

#include "ayc/annotations/annotation_set.hpp"

#include <algorithm>
#include <cmath>

#include "ayc/core/error.hpp"

namespace ayc::annotations {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_box(const AnnotationSet& set, const BBox& b) {
  const bool finite = std::isfinite(b.x_min) && std::isfinite(b.y_min) &&
                      std::isfinite(b.x_max) && std::isfinite(b.y_max);
  if (!finite || !b.valid()) {
    throw Error(ErrorCode::kOutOfBounds, "box corners are not ordered");
  }
  bool inside = b.x_min >= 0.0 && b.y_min >= 0.0;
  if (set.image_width > 0) inside = inside && b.x_max <= set.image_width;
  if (set.image_height > 0) inside = inside && b.y_max <= set.image_height;
  if (!inside) {
    throw Error(ErrorCode::kOutOfBounds,
                "box lies outside image " + set.image_id + " (" +
                    std::to_string(set.image_width) + "x" + std::to_string(set.image_height) + ")");
  }
}

void check_class(int class_id) {
  if (class_id < 0) throw Error(ErrorCode::kBadRequest, "class_id must be nonnegative");
}

std::string new_box_id(std::int64_t revision, std::size_t k) {
  return "b" + std::to_string(revision) + "." + std::to_string(k);
}

AnnotatedBox& require_box(AnnotationSet& set, const std::string& box_id) {
  auto it = std::find_if(set.boxes.begin(), set.boxes.end(),
                         [&](const AnnotatedBox& b) { return b.box_id == box_id; });
  if (it == set.boxes.end()) {
    throw Error(ErrorCode::kUnknownBoxId, "no box '" + box_id + "' in image " + set.image_id);
  }
  return *it;
}

json box_to_json(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

BBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorCode::kBadRequest, "bbox must be [x_min, y_min, x_max, y_max]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kHuman: return "human";
    case Provenance::kModelSuggested: return "model_suggested";
    case Provenance::kModelAccepted: return "model_accepted";
  }
  return "human";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "human") return Provenance::kHuman;
  if (s == "model_suggested") return Provenance::kModelSuggested;
  if (s == "model_accepted") return Provenance::kModelAccepted;
  return std::nullopt;
}

const AnnotatedBox* AnnotationSet::find(std::string_view box_id) const {
  for (const auto& b : boxes) {
    if (b.box_id == box_id) return &b;
  }
  return nullptr;
}

AnnotationSet apply_edit(const AnnotationSet& set, const Edit& edit) {
  if (edit.expected_revision != set.revision) {
    throw Error(ErrorCode::kRevisionConflict,
                "image " + set.image_id + " is at revision " + std::to_string(set.revision) +
                    ", edit expected " + std::to_string(edit.expected_revision),
                {{"current_revision", set.revision}});
  }
  AnnotationSet next = set;
  next.revision = set.revision + 1;
  std::visit(overloaded{
                 [&](const AddBox& op) {
                   check_box(set, op.bbox);
                   check_class(op.class_id);
                   next.boxes.push_back(
                       {new_box_id(next.revision, 0), op.bbox, op.class_id, Provenance::kHuman});
                 },
                 [&](const RemoveBox& op) {
                   require_box(next, op.box_id);
                   std::erase_if(next.boxes,
                                 [&](const AnnotatedBox& b) { return b.box_id == op.box_id; });
                 },
                 [&](const AdjustBox& op) {
                   AnnotatedBox& box = require_box(next, op.box_id);
                   check_box(set, op.new_bbox);
                   box.bbox = op.new_bbox;
                   box.provenance = Provenance::kHuman;
                 },
                 [&](const AcceptDetections& op) {
                   for (std::size_t k = 0; k < op.detections.size(); ++k) {
                     const auto& d = op.detections[k];
                     check_box(set, d.box);
                     check_class(d.class_id);
                     next.boxes.push_back({new_box_id(next.revision, k), d.box, d.class_id,
                                           Provenance::kModelAccepted});
                   }
                 },
             },
             edit.op);
  return next;
}

json to_json(const Edit& edit) {
  json doc = std::visit(
      overloaded{
          [](const AddBox& op) -> json {
            return {{"type", "add"}, {"bbox", box_to_json(op.bbox)}, {"class_id", op.class_id}};
          },
          [](const RemoveBox& op) -> json { return {{"type", "remove"}, {"box_id", op.box_id}}; },
          [](const AdjustBox& op) -> json {
            return {{"type", "adjust"}, {"box_id", op.box_id}, {"bbox", box_to_json(op.new_bbox)}};
          },
          [](const AcceptDetections& op) -> json {
            json dets = json::array();
            for (const auto& d : op.detections) {
              dets.push_back({{"bbox", box_to_json(d.box)},
                              {"class_id", d.class_id},
                              {"confidence", d.confidence}});
            }
            return {{"type", "accept_detections"}, {"detections", dets}};
          },
      },
      edit.op);
  doc["expected_revision"] = edit.expected_revision;
  return doc;
}

Edit edit_from_json(const json& doc) {
  try {
    Edit edit;
    edit.expected_revision = doc.at("expected_revision").get<std::int64_t>();
    const auto type = doc.at("type").get<std::string>();
    if (type == "add") {
      edit.op = AddBox{box_from_json(doc.at("bbox")), doc.value("class_id", 0)};
    } else if (type == "remove") {
      edit.op = RemoveBox{doc.at("box_id").get<std::string>()};
    } else if (type == "adjust") {
      edit.op = AdjustBox{doc.at("box_id").get<std::string>(), box_from_json(doc.at("bbox"))};
    } else if (type == "accept_detections") {
      AcceptDetections op;
      for (const auto& d : doc.at("detections")) {
        op.detections.push_back({box_from_json(d.at("bbox")), d.value("class_id", 0),
                                 d.value("confidence", 1.0)});
      }
      edit.op = std::move(op);
    } else {
      throw Error(ErrorCode::kBadRequest, "unknown edit type '" + type + "'");
    }
    return edit;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadRequest, std::string("malformed edit: ") + e.what());
  }
}

json to_json(const AnnotationSet& set) {
  json boxes = json::array();
  for (const auto& b : set.boxes) {
    boxes.push_back({{"box_id", b.box_id},
                     {"bbox", box_to_json(b.bbox)},
                     {"class_id", b.class_id},
                     {"provenance", std::string(to_string(b.provenance))}});
  }
  return {{"image_id", set.image_id},
          {"width", set.image_width},
          {"height", set.image_height},
          {"revision", set.revision},
          {"boxes", boxes}};
}

}  // namespace ayc::annotations
