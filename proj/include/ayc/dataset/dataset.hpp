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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ayc/annotations/store.hpp"
#include "ayc/eval/evaluation.hpp"

namespace ayc::dataset {

struct ImageRecord {
  std::string image_id;  // file name stem
  std::filesystem::path path;
  int width = 0;
  int height = 0;
};

/// Every decodable png/jpeg/bmp/tiff directly inside `dir`, sorted by file
/// name. Errors: DirUnreadable, DuplicateImageId.
std::vector<ImageRecord> scan_directory(const std::filesystem::path& dir);

/// SplitMix64 (Steele, Lea & Flood). The only randomness source of a split.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection; `bound` > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle of 0..n-1: for i = n-1 down to 1, swap i with
/// `below(i + 1)`.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

enum class Part { kTrain, kVal, kTest };

std::string_view to_string(Part part);
/// Errors: BadRequest.
Part part_from_string(std::string_view s);

struct DatasetSplit {
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  const std::vector<std::string>& members(Part part) const;
};

/// Sorts `image_ids`, shuffles them with `seeded_permutation`, then assigns
/// the first round(test * N) to test, the next round(val * N) to val and
/// the rest to train. Member lists are stored sorted.
/// Errors: BadRatios, TooFewImages.
DatasetSplit split_dataset(std::vector<std::string> image_ids, const SplitRatios& ratios,
                           std::uint64_t seed);

/// `{"seed", "ratios": [train, val, test], "train", "val", "test"}`.
std::string split_to_json_text(const DatasetSplit& split);
DatasetSplit split_from_json(const nlohmann::json& doc);

struct EvalImage {
  std::string image_id;
  std::filesystem::path path;  // empty when not known
  int width = 0;
  int height = 0;
  eval::ImageGroundTruth ground_truth;
};

struct EvaluableDataset {
  std::vector<EvalImage> train;
  std::vector<EvalImage> val;
  std::vector<EvalImage> test;

  const std::vector<EvalImage>& part(Part p) const;
};

/// Joins split members with their ground truth (and file paths from
/// `records` when given). Errors: MissingAnnotations, with the offending
/// ids under `details.image_ids`.
EvaluableDataset pair_with_annotations(const DatasetSplit& split,
                                       const annotations::AnnotationStore& store,
                                       const std::vector<ImageRecord>& records = {});

}  // namespace ayc::dataset
