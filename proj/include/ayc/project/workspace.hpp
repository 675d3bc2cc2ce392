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

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ayc/annotations/store.hpp"
#include "ayc/dataset/dataset.hpp"
#include "ayc/eval/evaluation.hpp"
#include "ayc/eval/training_log.hpp"
#include "ayc/runtime/registry.hpp"

namespace ayc::project {

/// Reserved benchmark model id that replays ground truth as confidence-1.0
/// predictions.
inline constexpr const char* kGroundTruthModelId = "@ground_truth";

/// Project directory layout:
///   images/                    source images (file stem = image id)
///   models/<id>.onnx           model files, each with <file>.manifest.json
///   annotations.json, annotations.base.json, audit.log
///   split.json
///   logs/<model_id>.json       ingested loss series
struct Layout {
  std::filesystem::path root;

  std::filesystem::path images_dir() const { return root / "images"; }
  std::filesystem::path models_dir() const { return root / "models"; }
  std::filesystem::path split_file() const { return root / "split.json"; }
  std::filesystem::path logs_dir() const { return root / "logs"; }
};

struct BenchmarkResult {
  dataset::Part part = dataset::Part::kTest;
  std::vector<eval::EvalReport> reports;
  std::vector<eval::RankingRow> ranking;
};

nlohmann::json to_json(const BenchmarkResult& result);

/// Throws Error(kBadRequest) for ids that are empty or unsafe as file names.
void check_identifier(const std::string& id, const char* what);

/// All modules bound to one project directory.
class Workspace {
 public:
  using Progress = std::function<void(std::size_t done, std::size_t total)>;

  /// Creates the layout if needed, loads model sidecars, annotations and
  /// scans images. Errors: ProjectDirUnwritable.
  explicit Workspace(std::filesystem::path root,
                     runtime::ModelRegistry::SessionFactory factory = {});

  const Layout& layout() const { return layout_; }

  runtime::ModelRegistry& registry() { return *registry_; }
  annotations::AnnotationStore& annotations() { return *annotations_; }

  /// Copies the model file into models/ (as `<model_id>.onnx` unless it is
  /// already there), writes its sidecar manifest and registers it.
  runtime::ModelDescriptor register_model(runtime::ModelManifest manifest);

  /// Descriptor JSON with paths relative to the project root.
  nlohmann::json describe(const runtime::ModelDescriptor& d) const;
  nlohmann::json describe(const runtime::InferenceResult& r) const;
  nlohmann::json describe(const dataset::ImageRecord& r) const;

  /// Rescans images/ and makes sure every image has an annotation set.
  std::vector<dataset::ImageRecord> scan_images();
  std::vector<dataset::ImageRecord> images() const;
  /// Errors: UnknownImageId.
  dataset::ImageRecord image(const std::string& image_id) const;

  /// Splits every scanned image and writes split.json.
  dataset::DatasetSplit split(const dataset::SplitRatios& ratios, std::uint64_t seed);
  /// Errors: SplitMissing.
  dataset::DatasetSplit load_split() const;

  eval::LossSeries ingest_log(const std::string& model_id, std::string_view csv);
  /// Errors: NotFound.
  eval::LossSeries loss_series(const std::string& model_id) const;

  /// Runs each model over one split part, evaluates mAP@50 and ranks.
  /// Errors: SplitMissing, MissingAnnotations, UnknownModelId, EmptyInput,
  /// plus inference errors.
  BenchmarkResult benchmark(const std::vector<std::string>& model_ids, dataset::Part part,
                            const Progress& progress = {});

 private:
  void load_models();

  Layout layout_;
  std::unique_ptr<runtime::ModelRegistry> registry_;
  std::unique_ptr<annotations::AnnotationStore> annotations_;
  mutable std::shared_mutex images_mutex_;
  std::vector<dataset::ImageRecord> images_;
  std::mutex register_mutex_;
  mutable std::mutex files_mutex_;
};

}  // namespace ayc::project
