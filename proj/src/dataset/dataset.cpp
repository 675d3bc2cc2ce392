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

#include "ayc/dataset/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "ayc/core/error.hpp"
#include "ayc/runtime/preprocess.hpp"

namespace ayc::dataset {
namespace {

bool has_image_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" ||
         ext == ".tiff";
}

}  // namespace

std::vector<ImageRecord> scan_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kDirUnreadable, "cannot read image directory '" +
                                               dir.filename().string() + "'");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : it) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& l, const auto& r) {
    return l.filename().string() < r.filename().string();
  });

  std::map<std::string, std::string> stems;
  std::vector<ImageRecord> records;
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    if (auto dup = stems.find(stem); dup != stems.end()) {
      throw Error(ErrorCode::kDuplicateImageId,
                  "image id '" + stem + "' used by " + dup->second + " and " + f.filename().string(),
                  {{"image_id", stem}});
    }
    stems.emplace(stem, f.filename().string());
    try {
      const auto raster = runtime::load_image(f);
      records.push_back({stem, f, raster.width, raster.height});
    } catch (const Error&) {
      // undecodable files are not images
    }
  }
  return records;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::string_view to_string(Part part) {
  switch (part) {
    case Part::kTrain: return "train";
    case Part::kVal: return "val";
    case Part::kTest: return "test";
  }
  return "test";
}

Part part_from_string(std::string_view s) {
  if (s == "train") return Part::kTrain;
  if (s == "val") return Part::kVal;
  if (s == "test") return Part::kTest;
  throw Error(ErrorCode::kBadRequest, "part must be train, val or test");
}

const std::vector<std::string>& DatasetSplit::members(Part part) const {
  switch (part) {
    case Part::kTrain: return train;
    case Part::kVal: return val;
    case Part::kTest: return test;
  }
  return test;
}

DatasetSplit split_dataset(std::vector<std::string> image_ids, const SplitRatios& ratios,
                           std::uint64_t seed) {
  const double sum = ratios.train + ratios.val + ratios.test;
  if (ratios.train < 0.0 || ratios.val < 0.0 || ratios.test < 0.0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kBadRatios, "split ratios must be nonnegative and sum to 1");
  }
  std::sort(image_ids.begin(), image_ids.end());
  if (std::adjacent_find(image_ids.begin(), image_ids.end()) != image_ids.end()) {
    throw Error(ErrorCode::kDuplicateImageId, "image index contains duplicate ids");
  }
  const std::size_t n = image_ids.size();
  const bool all_nonzero = ratios.train > 0.0 && ratios.val > 0.0 && ratios.test > 0.0;
  if (all_nonzero && n < 3) {
    throw Error(ErrorCode::kTooFewImages,
                "need at least 3 images for a three-way split, have " + std::to_string(n));
  }
  const auto n_val = static_cast<std::size_t>(std::llround(ratios.val * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::llround(ratios.test * static_cast<double>(n)));
  if (n_val + n_test > n) {
    throw Error(ErrorCode::kTooFewImages, "rounded val/test sizes exceed the image count");
  }

  DatasetSplit split;
  split.seed = seed;
  split.ratios = ratios;
  const auto perm = seeded_permutation(n, seed);
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& id = image_ids[perm[k]];
    if (k < n_test) {
      split.test.push_back(id);
    } else if (k < n_test + n_val) {
      split.val.push_back(id);
    } else {
      split.train.push_back(id);
    }
  }
  for (auto* part : {&split.train, &split.val, &split.test}) std::sort(part->begin(), part->end());
  return split;
}

std::string split_to_json_text(const DatasetSplit& split) {
  nlohmann::ordered_json doc;
  doc["seed"] = split.seed;
  doc["ratios"] = {split.ratios.train, split.ratios.val, split.ratios.test};
  doc["train"] = split.train;
  doc["val"] = split.val;
  doc["test"] = split.test;
  return doc.dump(2) + "\n";
}

DatasetSplit split_from_json(const nlohmann::json& doc) {
  try {
    DatasetSplit s;
    s.seed = doc.at("seed").get<std::uint64_t>();
    const auto& r = doc.at("ratios");
    s.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    s.train = doc.at("train").get<std::vector<std::string>>();
    s.val = doc.at("val").get<std::vector<std::string>>();
    s.test = doc.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed split: ") + e.what());
  }
}

const std::vector<EvalImage>& EvaluableDataset::part(Part p) const {
  switch (p) {
    case Part::kTrain: return train;
    case Part::kVal: return val;
    case Part::kTest: return test;
  }
  return test;
}

EvaluableDataset pair_with_annotations(const DatasetSplit& split,
                                       const annotations::AnnotationStore& store,
                                       const std::vector<ImageRecord>& records) {
  std::map<std::string, const ImageRecord*> by_id;
  for (const auto& r : records) by_id[r.image_id] = &r;

  EvaluableDataset out;
  std::vector<std::string> missing;
  auto fill = [&](const std::vector<std::string>& ids, std::vector<EvalImage>& dest) {
    for (const auto& id : ids) {
      auto set = store.get(id);
      if (!set) {
        missing.push_back(id);
        continue;
      }
      EvalImage img;
      img.image_id = id;
      img.width = set->image_width;
      img.height = set->image_height;
      if (auto r = by_id.find(id); r != by_id.end()) {
        img.path = r->second->path;
        if (img.width <= 0) img.width = r->second->width;
        if (img.height <= 0) img.height = r->second->height;
      }
      for (const auto& b : set->boxes) img.ground_truth.push_back({b.bbox, b.class_id});
      dest.push_back(std::move(img));
    }
  };
  fill(split.train, out.train);
  fill(split.val, out.val);
  fill(split.test, out.test);
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kMissingAnnotations, "no annotation set for: " + list,
                {{"image_ids", missing}});
  }
  return out;
}

}  // namespace ayc::dataset
