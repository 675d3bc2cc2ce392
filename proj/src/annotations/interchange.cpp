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

#include "ayc/annotations/interchange.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ayc/core/error.hpp"

namespace ayc::annotations {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Slack for normalized YOLO coordinates printed with six decimals.
constexpr double kNormalizedSlack = 1e-6;

void check_class(int class_id, const std::vector<std::string>& class_names) {
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= class_names.size()) {
    throw Error(ErrorCode::kUnknownClass, "class id " + std::to_string(class_id) +
                                              " has no entry in the class list");
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string image_id_from_file_name(std::string_view name) {
  static constexpr std::array<std::string_view, 8> kExtensions = {
      ".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".txt", ".json"};
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string_view::npos) {
    const auto ext = lower(name.substr(dot));
    if (std::find(kExtensions.begin(), kExtensions.end(), ext) != kExtensions.end()) {
      name = name.substr(0, dot);
    }
  }
  return std::string(name);
}

std::string export_coco(std::span<const AnnotationSet> sets,
                        const std::vector<std::string>& class_names, bool store_fields) {
  std::vector<const AnnotationSet*> ordered;
  for (const auto& s : sets) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* l, const auto* r) { return l->image_id < r->image_id; });

  ordered_json images = ordered_json::array();
  ordered_json anns = ordered_json::array();
  std::int64_t ann_id = 1;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const AnnotationSet& set = *ordered[i];
    const auto image_num = static_cast<std::int64_t>(i + 1);
    ordered_json img = {{"id", image_num},
                        {"file_name", set.image_id},
                        {"width", set.image_width},
                        {"height", set.image_height}};
    if (store_fields) img["revision"] = set.revision;
    images.push_back(std::move(img));
    for (const auto& b : set.boxes) {
      check_class(b.class_id, class_names);
      ordered_json a = {{"id", ann_id++},
                        {"image_id", image_num},
                        {"category_id", b.class_id + 1},
                        {"bbox", {b.bbox.x_min, b.bbox.y_min, b.bbox.width(), b.bbox.height()}},
                        {"area", b.bbox.area()},
                        {"iscrowd", 0}};
      if (store_fields) {
        a["box_id"] = b.box_id;
        a["provenance"] = std::string(to_string(b.provenance));
      }
      anns.push_back(std::move(a));
    }
  }
  ordered_json cats = ordered_json::array();
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    cats.push_back({{"id", static_cast<int>(c) + 1}, {"name", class_names[c]}});
  }
  ordered_json doc = {{"images", images}, {"annotations", anns}, {"categories", cats}};
  return doc.dump(2) + "\n";
}

Payload export_yolo(std::span<const AnnotationSet> sets, const std::vector<std::string>& class_names) {
  Payload files;
  for (const auto& set : sets) {
    if (set.image_width <= 0 || set.image_height <= 0) {
      throw Error(ErrorCode::kDimsMissing, "image dimensions unknown for " + set.image_id);
    }
    const double w = set.image_width;
    const double h = set.image_height;
    std::string text;
    char line[160];
    for (const auto& b : set.boxes) {
      check_class(b.class_id, class_names);
      const double cx = (b.bbox.x_min + b.bbox.x_max) / 2.0 / w;
      const double cy = (b.bbox.y_min + b.bbox.y_max) / 2.0 / h;
      std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n", b.class_id, cx, cy,
                    b.bbox.width() / w, b.bbox.height() / h);
      text += line;
    }
    files[set.image_id + ".txt"] = std::move(text);
  }
  return files;
}

CocoImport import_coco(std::string_view json_text, const std::vector<std::string>& class_names,
                       bool store_fields) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("COCO document is not valid JSON: ") + e.what());
  }
  CocoImport out;
  try {
    if (!doc.is_object()) throw Error(ErrorCode::kParseError, "COCO document must be an object");

    // category id -> class index
    std::map<std::int64_t, int> category_class;
    std::vector<std::pair<std::int64_t, std::string>> cats;
    for (const auto& c : doc.value("categories", json::array())) {
      cats.emplace_back(c.at("id").get<std::int64_t>(), c.value("name", std::string()));
    }
    std::sort(cats.begin(), cats.end());
    if (class_names.empty()) {
      for (std::size_t i = 0; i < cats.size(); ++i) {
        category_class[cats[i].first] = static_cast<int>(i);
        out.class_names.push_back(cats[i].second);
      }
    } else {
      out.class_names = class_names;
      for (const auto& [id, name] : cats) {
        auto it = std::find(class_names.begin(), class_names.end(), name);
        if (it == class_names.end()) {
          throw Error(ErrorCode::kUnknownClass, "category '" + name + "' is not in the class list");
        }
        category_class[id] = static_cast<int>(it - class_names.begin());
      }
    }

    std::map<std::int64_t, AnnotationSet> by_image;
    std::map<std::string, std::int64_t> seen_ids;
    for (const auto& img : doc.at("images")) {
      AnnotationSet set;
      const auto id = img.at("id").get<std::int64_t>();
      set.image_id = image_id_from_file_name(img.at("file_name").get<std::string>());
      set.image_width = img.value("width", 0);
      set.image_height = img.value("height", 0);
      if (store_fields) set.revision = img.value("revision", std::int64_t{0});
      if (seen_ids.contains(set.image_id)) {
        throw Error(ErrorCode::kParseError, "image '" + set.image_id + "' listed twice");
      }
      seen_ids[set.image_id] = id;
      by_image.emplace(id, std::move(set));
    }

    std::map<std::int64_t, std::size_t> per_image_count;
    for (const auto& a : doc.at("annotations")) {
      const auto image_num = a.at("image_id").get<std::int64_t>();
      auto it = by_image.find(image_num);
      if (it == by_image.end()) {
        throw Error(ErrorCode::kParseError,
                    "annotation refers to unknown image id " + std::to_string(image_num));
      }
      AnnotationSet& set = it->second;
      const auto cat = a.at("category_id").get<std::int64_t>();
      auto cit = category_class.find(cat);
      if (cit == category_class.end()) {
        throw Error(ErrorCode::kUnknownClass, "annotation uses undeclared category " + std::to_string(cat));
      }
      const auto& bb = a.at("bbox");
      if (!bb.is_array() || bb.size() != 4) throw Error(ErrorCode::kParseError, "bbox must have 4 numbers");
      const double x = bb[0].get<double>(), y = bb[1].get<double>();
      const double w = bb[2].get<double>(), h = bb[3].get<double>();
      if (w < 0.0 || h < 0.0) throw Error(ErrorCode::kParseError, "bbox with negative size");
      AnnotatedBox box;
      box.bbox = {x, y, x + w, y + h};
      box.class_id = cit->second;
      const bool outside = x < 0.0 || y < 0.0 ||
                           (set.image_width > 0 && box.bbox.x_max > set.image_width + 1e-9) ||
                           (set.image_height > 0 && box.bbox.y_max > set.image_height + 1e-9);
      if (outside) {
        throw Error(ErrorCode::kInconsistentDims,
                    "box outside the declared size of image " + set.image_id);
      }
      const std::size_t k = per_image_count[image_num]++;
      box.box_id = "i" + std::to_string(k);
      if (store_fields) {
        box.box_id = a.value("box_id", box.box_id);
        auto prov = provenance_from_string(a.value("provenance", std::string("human")));
        if (!prov) throw Error(ErrorCode::kParseError, "unknown provenance");
        box.provenance = *prov;
      }
      set.boxes.push_back(std::move(box));
    }
    for (auto& [id, set] : by_image) out.sets.push_back(std::move(set));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed COCO document: ") + e.what());
  }
  std::sort(out.sets.begin(), out.sets.end(),
            [](const auto& l, const auto& r) { return l.image_id < r.image_id; });
  return out;
}

std::vector<AnnotationSet> import_yolo(const Payload& files,
                                       const std::map<std::string, ImageDims>& dims) {
  std::vector<AnnotationSet> sets;
  for (const auto& [name, content] : files) {
    AnnotationSet set;
    set.image_id = image_id_from_file_name(name);
    auto d = dims.find(set.image_id);
    if (d == dims.end() || d->second.width <= 0 || d->second.height <= 0) {
      throw Error(ErrorCode::kDimsMissing, "no image dimensions for " + set.image_id);
    }
    set.image_width = d->second.width;
    set.image_height = d->second.height;
    const double w = set.image_width;
    const double h = set.image_height;

    std::istringstream lines(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      std::istringstream fields(line);
      std::vector<std::string> tok;
      for (std::string t; fields >> t;) tok.push_back(t);
      if (tok.empty()) continue;
      auto where = [&] { return name + ":" + std::to_string(line_no); };
      if (tok.size() != 5) {
        throw Error(ErrorCode::kParseError, where() + ": expected 5 fields, got " + std::to_string(tok.size()));
      }
      std::array<double, 4> v{};
      int class_id = 0;
      try {
        std::size_t used = 0;
        class_id = std::stoi(tok[0], &used);
        if (used != tok[0].size()) throw std::invalid_argument("class");
        for (std::size_t i = 0; i < 4; ++i) {
          v[i] = std::stod(tok[i + 1], &used);
          if (used != tok[i + 1].size()) throw std::invalid_argument("coordinate");
        }
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, where() + ": non-numeric field");
      }
      if (class_id < 0) throw Error(ErrorCode::kParseError, where() + ": negative class id");
      const double x0 = v[0] - v[2] / 2.0, x1 = v[0] + v[2] / 2.0;
      const double y0 = v[1] - v[3] / 2.0, y1 = v[1] + v[3] / 2.0;
      if (v[2] < 0.0 || v[3] < 0.0 || x0 < -kNormalizedSlack || y0 < -kNormalizedSlack ||
          x1 > 1.0 + kNormalizedSlack || y1 > 1.0 + kNormalizedSlack) {
        throw Error(ErrorCode::kInconsistentDims, where() + ": normalized box outside [0, 1]");
      }
      AnnotatedBox box;
      box.box_id = "i" + std::to_string(set.boxes.size());
      box.class_id = class_id;
      box.bbox = {std::clamp(x0 * w, 0.0, w), std::clamp(y0 * h, 0.0, h),
                  std::clamp(x1 * w, 0.0, w), std::clamp(y1 * h, 0.0, h)};
      set.boxes.push_back(std::move(box));
    }
    sets.push_back(std::move(set));
  }
  std::sort(sets.begin(), sets.end(),
            [](const auto& l, const auto& r) { return l.image_id < r.image_id; });
  return sets;
}

Payload export_annotations(std::span<const AnnotationSet> sets, Format format,
                           const std::vector<std::string>& class_names,
                           const std::map<std::string, ImageDims>& dims) {
  std::vector<AnnotationSet> filled(sets.begin(), sets.end());
  for (auto& s : filled) {
    auto d = dims.find(s.image_id);
    if (d != dims.end() && (s.image_width <= 0 || s.image_height <= 0)) {
      s.image_width = d->second.width;
      s.image_height = d->second.height;
    }
  }
  if (format == Format::kYolo) return export_yolo(filled, class_names);
  return {{kCocoFileName, export_coco(filled, class_names)}};
}

std::vector<AnnotationSet> import_annotations(const Payload& payload, Format format,
                                              const std::map<std::string, ImageDims>& dims,
                                              const std::vector<std::string>& class_names) {
  if (format == Format::kYolo) return import_yolo(payload, dims);
  if (payload.size() != 1) throw Error(ErrorCode::kParseError, "COCO payload must be a single document");
  auto sets = import_coco(payload.begin()->second, class_names).sets;
  for (auto& s : sets) {
    auto d = dims.find(s.image_id);
    if (d == dims.end()) continue;
    if (s.image_width <= 0 || s.image_height <= 0) {
      s.image_width = d->second.width;
      s.image_height = d->second.height;
    } else if (s.image_width != d->second.width || s.image_height != d->second.height) {
      throw Error(ErrorCode::kInconsistentDims,
                  "declared size of " + s.image_id + " disagrees with the image file");
    }
  }
  return sets;
}

}  // namespace ayc::annotations
