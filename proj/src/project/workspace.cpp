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

#include "ayc/project/workspace.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "ayc/core/error.hpp"
#include "ayc/core/fs.hpp"

namespace ayc::project {
namespace {

namespace stdfs = std::filesystem;
using nlohmann::json;

void ensure_writable(const stdfs::path& root) {
  std::error_code ec;
  stdfs::create_directories(root, ec);
  const auto probe = root / ".ayc_write_probe";
  {
    std::ofstream out(probe);
    if (ec || !out) {
      throw Error(ErrorCode::kProjectDirUnwritable,
                  "project directory '" + root.filename().string() + "' is not writable");
    }
  }
  stdfs::remove(probe, ec);
}

json box_json(const detection::BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

}  // namespace

void check_identifier(const std::string& id, const char* what) {
  const bool bad = id.empty() || id == "." || id == ".." ||
                   id.find_first_of("/\\") != std::string::npos || id.find('\0') != std::string::npos;
  if (bad) throw Error(ErrorCode::kBadRequest, std::string("invalid ") + what + " '" + id + "'");
}

json to_json(const BenchmarkResult& result) {
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(eval::to_json(r));
  return {{"part", std::string(dataset::to_string(result.part))},
          {"reports", reports},
          {"ranking", eval::to_json(result.ranking)}};
}

Workspace::Workspace(stdfs::path root, runtime::ModelRegistry::SessionFactory factory)
    : layout_{stdfs::absolute(root).lexically_normal()} {
  ensure_writable(layout_.root);
  std::error_code ec;
  stdfs::create_directories(layout_.models_dir(), ec);
  stdfs::create_directories(layout_.logs_dir(), ec);
  stdfs::create_directories(layout_.images_dir(), ec);
  registry_ = factory ? std::make_unique<runtime::ModelRegistry>(std::move(factory))
                      : std::make_unique<runtime::ModelRegistry>();
  annotations_ = std::make_unique<annotations::AnnotationStore>(layout_.root);
  load_models();
  scan_images();
}

void Workspace::load_models() {
  std::vector<stdfs::path> sidecars;
  for (const auto& entry : stdfs::directory_iterator(layout_.models_dir())) {
    const auto name = entry.path().filename().string();
    if (name.size() > 14 && name.ends_with(".manifest.json")) sidecars.push_back(entry.path());
  }
  std::sort(sidecars.begin(), sidecars.end());
  for (const auto& p : sidecars) {
    try {
      registry_->register_model(runtime::load_manifest(p));
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: skipping %s: %s\n", p.filename().string().c_str(), e.what());
    }
  }
}

runtime::ModelDescriptor Workspace::register_model(runtime::ModelManifest manifest) {
  std::lock_guard lock(register_mutex_);
  check_identifier(manifest.model_id, "model id");
  if (manifest.model_id.starts_with("@")) {
    throw Error(ErrorCode::kInvalidManifest, "model ids starting with '@' are reserved");
  }
  if (registry_->find(manifest.model_id)) {
    throw Error(ErrorCode::kDuplicateModelId, "model id already registered: " + manifest.model_id);
  }
  manifest.validate();
  runtime::validate_signature(manifest, runtime::read_onnx_signature(manifest.file_path));

  const auto source = stdfs::weakly_canonical(manifest.file_path);
  const auto models = stdfs::weakly_canonical(layout_.models_dir());
  stdfs::path dest = source;
  bool copied = false;
  if (source.parent_path() != models) {
    dest = models / (manifest.model_id + ".onnx");
    std::error_code ec;
    stdfs::copy_file(source, dest, stdfs::copy_options::overwrite_existing, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot copy model into the project");
    copied = true;
  }
  manifest.file_path = dest;
  const auto sidecar = runtime::manifest_path_for(dest);
  try {
    fs::write_text_atomic(sidecar, runtime::manifest_to_json(manifest, models).dump(2) + "\n");
    return registry_->register_model(std::move(manifest));
  } catch (...) {
    std::error_code ec;
    stdfs::remove(sidecar, ec);
    if (copied) stdfs::remove(dest, ec);
    throw;
  }
}

json Workspace::describe(const runtime::ModelDescriptor& d) const {
  json doc = runtime::manifest_to_json(d.manifest, layout_.root);
  doc["file"] = fs::display_path(d.manifest.file_path, layout_.root);
  json outputs = json::array();
  for (const auto& o : d.signature.outputs) outputs.push_back({{"name", o.name}, {"shape", o.dims}});
  json inputs = json::array();
  for (const auto& i : d.signature.inputs) inputs.push_back({{"name", i.name}, {"shape", i.dims}});
  doc["signature"] = {{"inputs", inputs}, {"outputs", outputs}};
  const auto active = registry_->active_model_id();
  doc["active"] = active && *active == d.id();
  return doc;
}

json Workspace::describe(const runtime::InferenceResult& r) const {
  json dets = json::array();
  for (const auto& d : r.detections) {
    dets.push_back({{"bbox", box_json(d.box)}, {"class_id", d.class_id}, {"confidence", d.confidence}});
  }
  return {{"model_id", r.model_id},
          {"image_width", r.image_width},
          {"image_height", r.image_height},
          {"confidence_threshold", r.confidence_threshold},
          {"nms_iou", r.nms_iou},
          {"detections", dets},
          {"latency_ms",
           {{"preprocess", r.latency.preprocess_ms},
            {"forward", r.latency.forward_ms},
            {"postprocess", r.latency.postprocess_ms},
            {"total", r.latency.total_ms()}}}};
}

json Workspace::describe(const dataset::ImageRecord& r) const {
  json doc = {{"image_id", r.image_id},
              {"file", fs::display_path(r.path, layout_.root)},
              {"width", r.width},
              {"height", r.height}};
  if (auto set = annotations_->get(r.image_id)) {
    doc["revision"] = set->revision;
    doc["box_count"] = set->boxes.size();
  }
  return doc;
}

std::vector<dataset::ImageRecord> Workspace::scan_images() {
  auto records = dataset::scan_directory(layout_.images_dir());
  for (const auto& r : records) annotations_->ensure_image(r.image_id, r.width, r.height);
  std::unique_lock lock(images_mutex_);
  images_ = records;
  return records;
}

std::vector<dataset::ImageRecord> Workspace::images() const {
  std::shared_lock lock(images_mutex_);
  return images_;
}

dataset::ImageRecord Workspace::image(const std::string& image_id) const {
  std::shared_lock lock(images_mutex_);
  for (const auto& r : images_) {
    if (r.image_id == image_id) return r;
  }
  throw Error(ErrorCode::kUnknownImageId, "unknown image id '" + image_id + "'");
}

dataset::DatasetSplit Workspace::split(const dataset::SplitRatios& ratios, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& r : images()) ids.push_back(r.image_id);
  auto result = dataset::split_dataset(std::move(ids), ratios, seed);
  std::lock_guard lock(files_mutex_);
  fs::write_text_atomic(layout_.split_file(), dataset::split_to_json_text(result));
  return result;
}

dataset::DatasetSplit Workspace::load_split() const {
  std::lock_guard lock(files_mutex_);
  if (!stdfs::exists(layout_.split_file())) {
    throw Error(ErrorCode::kSplitMissing, "project has no split.json; run a split first");
  }
  try {
    return dataset::split_from_json(json::parse(fs::read_text(layout_.split_file())));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("split.json is not JSON: ") + e.what());
  }
}

eval::LossSeries Workspace::ingest_log(const std::string& model_id, std::string_view csv) {
  check_identifier(model_id, "model id");
  auto series = eval::ingest_training_log(csv, model_id);
  std::lock_guard lock(files_mutex_);
  fs::write_text_atomic(layout_.logs_dir() / (model_id + ".json"), eval::to_json(series).dump(2) + "\n");
  return series;
}

eval::LossSeries Workspace::loss_series(const std::string& model_id) const {
  check_identifier(model_id, "model id");
  const auto p = layout_.logs_dir() / (model_id + ".json");
  std::lock_guard lock(files_mutex_);
  if (!stdfs::exists(p)) throw Error(ErrorCode::kNotFound, "no training log for " + model_id);
  return eval::loss_series_from_json(json::parse(fs::read_text(p)));
}

BenchmarkResult Workspace::benchmark(const std::vector<std::string>& model_ids, dataset::Part part,
                                     const Progress& progress) {
  if (model_ids.empty()) throw Error(ErrorCode::kEmptyInput, "no models to benchmark");
  for (const auto& id : model_ids) {
    if (id != kGroundTruthModelId && !registry_->find(id)) {
      throw Error(ErrorCode::kUnknownModelId, "unknown model id: " + id);
    }
  }
  const auto split = load_split();
  const auto data = dataset::pair_with_annotations(split, *annotations_, images());
  const auto& images = data.part(part);

  BenchmarkResult result;
  result.part = part;
  const std::size_t total = images.size() * model_ids.size();
  std::size_t done = 0;
  for (const auto& id : model_ids) {
    std::vector<eval::ImageDetections> dets;
    std::vector<eval::ImageGroundTruth> gts;
    std::vector<double> latencies;
    std::vector<std::string> class_names = annotations_->class_names();
    if (id != kGroundTruthModelId) class_names = registry_->find(id)->manifest.class_names;

    for (const auto& img : images) {
      gts.push_back(img.ground_truth);
      if (id == kGroundTruthModelId) {
        eval::ImageDetections replay;
        for (const auto& g : img.ground_truth) replay.push_back({g.box, g.class_id, 1.0});
        dets.push_back(std::move(replay));
      } else {
        if (img.path.empty()) {
          throw Error(ErrorCode::kUnknownImageId, "no image file for '" + img.image_id + "'");
        }
        const auto raster = runtime::load_image(img.path);
        auto inference = registry_->run_inference(id, raster);
        latencies.push_back(inference.latency.total_ms());
        dets.push_back(std::move(inference.detections));
      }
      if (progress) progress(++done, total);
    }
    auto report = eval::map_at_iou(dets, gts, 0.5, class_names, id);
    if (!latencies.empty()) report.latency = eval::latency_stats(latencies);
    result.reports.push_back(std::move(report));
  }
  result.ranking = eval::compare_models(result.reports);
  return result;
}

}  // namespace ayc::project
