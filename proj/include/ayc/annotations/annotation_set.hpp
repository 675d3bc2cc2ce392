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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ayc/detection/box.hpp"

namespace ayc::annotations {

using detection::BBox;
using detection::Detection;

/// Where a box came from. Exports collapse all three to plain boxes.
enum class Provenance { kHuman, kModelSuggested, kModelAccepted };

std::string_view to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

struct AnnotatedBox {
  std::string box_id;
  BBox bbox;
  int class_id = 0;
  Provenance provenance = Provenance::kHuman;

  friend bool operator==(const AnnotatedBox&, const AnnotatedBox&) = default;
};

/// Ground truth for one image. `revision` counts committed edits.
struct AnnotationSet {
  std::string image_id;
  int image_width = 0;   // 0 when unknown
  int image_height = 0;
  std::vector<AnnotatedBox> boxes;
  std::int64_t revision = 0;

  const AnnotatedBox* find(std::string_view box_id) const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

struct AddBox {
  BBox bbox;
  int class_id = 0;
};

struct RemoveBox {
  std::string box_id;
};

struct AdjustBox {
  std::string box_id;
  BBox new_bbox;
};

struct AcceptDetections {
  std::vector<Detection> detections;
};

using EditOp = std::variant<AddBox, RemoveBox, AdjustBox, AcceptDetections>;

struct Edit {
  EditOp op;
  std::int64_t expected_revision = 0;
};

/// Applies `edit` to `set` and returns the next revision.
///
/// Boxes created by the edit get ids `b<revision>.<k>` where `revision` is
/// the new revision; replaying the same edits yields the same ids.
/// Add/Adjust mark the box as human; AcceptDetections adds model_accepted
/// boxes. Errors: RevisionConflict, UnknownBoxId, OutOfBounds.
AnnotationSet apply_edit(const AnnotationSet& set, const Edit& edit);

nlohmann::json to_json(const Edit& edit);
/// Errors: BadRequest on schema violations.
Edit edit_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const AnnotationSet& set);

}  // namespace ayc::annotations
