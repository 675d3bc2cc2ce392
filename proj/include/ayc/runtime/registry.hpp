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

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ayc/detection/box.hpp"
#include "ayc/runtime/manifest.hpp"
#include "ayc/runtime/onnx_signature.hpp"
#include "ayc/runtime/preprocess.hpp"
#include "ayc/runtime/session.hpp"

namespace ayc::runtime {

/// A registered manifest together with the graph signature it was
/// validated against.
struct ModelDescriptor {
  ModelManifest manifest;
  GraphSignature signature;

  const std::string& id() const { return manifest.model_id; }
  /// Output names the session must produce for the manifest's decode spec.
  std::vector<std::string> required_outputs() const;
};

/// Throws Error(kSignatureMismatch) when the decode spec or input size in
/// `manifest` contradicts `signature`.
void validate_signature(const ModelManifest& manifest, const GraphSignature& signature);

struct LatencyBreakdown {
  double preprocess_ms = 0.0;
  double forward_ms = 0.0;
  double postprocess_ms = 0.0;

  double total_ms() const { return preprocess_ms + forward_ms + postprocess_ms; }
};

struct InferenceOptions {
  std::optional<double> confidence;
  std::optional<double> nms_iou;
};

struct InferenceResult {
  std::string model_id;
  int image_width = 0;
  int image_height = 0;
  double confidence_threshold = 0.0;
  double nms_iou = 0.0;
  std::vector<detection::Detection> detections;  // confidence descending
  LatencyBreakdown latency;
};

/// Model registry with lazy session construction and hot-swap.
///
/// Registration and activation are serialized behind a writer lock.
/// Inference on one model is serialized on that model's session; different
/// models run concurrently. When another model is activated, the previously
/// active session is dropped as soon as no inference holds it; it is rebuilt
/// lazily if that model is used again.
class ModelRegistry {
 public:
  using SessionFactory =
      std::function<std::shared_ptr<InferenceSession>(const ModelDescriptor&)>;

  /// Sessions load through OpenCV DNN.
  ModelRegistry();
  explicit ModelRegistry(SessionFactory factory);
  ~ModelRegistry();

  ModelRegistry(const ModelRegistry&) = delete;
  ModelRegistry& operator=(const ModelRegistry&) = delete;

  /// Errors: FileNotFound, InvalidModelFile, SignatureMismatch,
  /// DuplicateModelId, InvalidManifest.
  ModelDescriptor register_model(ModelManifest manifest);

  /// Errors: UnknownModelId.
  ModelDescriptor activate_model(const std::string& model_id);

  std::vector<ModelDescriptor> list_models() const;
  std::optional<std::string> active_model_id() const;
  std::optional<ModelDescriptor> find(const std::string& model_id) const;

  /// Preprocess, forward, decode, confidence filter, then class-aware NMS.
  /// Uses the active model when `model_id` is empty. Overrides are clamped
  /// to [0, 1]. Errors: UnknownModelId, UnsupportedImageFormat,
  /// InferenceFailure, ShapeMismatch.
  InferenceResult run_inference(const std::optional<std::string>& model_id,
                                const Raster& image, const InferenceOptions& options = {});

  /// True while a session object is resident for `model_id`.
  bool session_loaded(const std::string& model_id) const;

 private:
  struct Entry;

  std::shared_ptr<Entry> entry(const std::string& model_id) const;
  static void release_if_idle(Entry& e);

  SessionFactory factory_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  std::optional<std::string> active_;
};

}  // namespace ayc::runtime
