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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ayc/annotations/annotation_set.hpp"

namespace ayc::annotations {

enum class Format { kCoco, kYolo };

struct ImageDims {
  int width = 0;
  int height = 0;
};

/// File name -> file content. COCO payloads hold a single `annotations.json`;
/// YOLO payloads hold one `<image_id>.txt` per image.
using Payload = std::map<std::string, std::string>;

inline constexpr const char* kCocoFileName = "annotations.json";

/// COCO document with images/annotations/categories arrays and [x, y, w, h]
/// boxes. Category ids are class index + 1. With `store_fields`, box ids,
/// provenance and revisions are kept as extra members (the on-disk store
/// format). Errors: UnknownClass.
std::string export_coco(std::span<const AnnotationSet> sets,
                        const std::vector<std::string>& class_names, bool store_fields = false);

/// One text file per image, lines `class cx cy w h` normalized to [0, 1]
/// with six decimals. Errors: UnknownClass, DimsMissing.
Payload export_yolo(std::span<const AnnotationSet> sets, const std::vector<std::string>& class_names);

struct CocoImport {
  std::vector<AnnotationSet> sets;  // sorted by image_id
  std::vector<std::string> class_names;
};

/// When `class_names` is non-empty, categories are mapped by name and an
/// unknown name is UnknownClass; otherwise categories sorted by id become
/// the class list. Imported sets are at revision 0 with human provenance
/// unless `store_fields` is set. Errors: ParseError, InconsistentDims,
/// UnknownClass.
CocoImport import_coco(std::string_view json_text, const std::vector<std::string>& class_names = {},
                       bool store_fields = false);

/// Errors: ParseError (including lines without exactly five fields),
/// DimsMissing, InconsistentDims (coordinates outside [0, 1]).
std::vector<AnnotationSet> import_yolo(const Payload& files,
                                       const std::map<std::string, ImageDims>& dims);

/// Format-dispatching wrappers. `dims` fills in sets whose own dimensions
/// are unknown.
Payload export_annotations(std::span<const AnnotationSet> sets, Format format,
                           const std::vector<std::string>& class_names,
                           const std::map<std::string, ImageDims>& dims = {});
std::vector<AnnotationSet> import_annotations(const Payload& payload, Format format,
                                              const std::map<std::string, ImageDims>& dims = {},
                                              const std::vector<std::string>& class_names = {});

/// `name` without a known image or label extension.
std::string image_id_from_file_name(std::string_view name);

}  // namespace ayc::annotations
