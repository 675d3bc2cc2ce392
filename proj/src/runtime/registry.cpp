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

#include "ayc/runtime/registry.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>

#include "ayc/core/error.hpp"
#include "ayc/runtime/decode.hpp"

namespace ayc::runtime {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorCode::kSignatureMismatch, what);
}

std::string dims_to_string(const std::vector<std::int64_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += dims[i] == kDynamicDim ? "?" : std::to_string(dims[i]);
  }
  return s + "]";
}

bool dim_is(std::int64_t dim, std::int64_t expected) {
  return dim == kDynamicDim || dim == expected;
}

// Dims with leading unit batch axes removed, down to `rank`.
std::vector<std::int64_t> core_dims(const TensorInfo& info, std::size_t rank) {
  auto dims = info.dims;
  while (dims.size() > rank && dim_is(dims.front(), 1)) dims.erase(dims.begin());
  return dims;
}

}  // namespace

std::vector<std::string> ModelDescriptor::required_outputs() const {
  const auto& d = manifest.decode;
  if (d.variant == DecodeVariant::kCombinedGrid) return {d.output_name};
  return {d.boxes_name, d.scores_name, d.labels_name};
}

void validate_signature(const ModelManifest& manifest, const GraphSignature& signature) {
  if (signature.inputs.size() != 1) {
    mismatch("expected exactly one graph input, found " +
             std::to_string(signature.inputs.size()));
  }
  const auto& in = signature.inputs.front();
  if (in.dims.size() == 4) {
    if (!dim_is(in.dims[1], 3) || !dim_is(in.dims[2], manifest.input_height) ||
        !dim_is(in.dims[3], manifest.input_width)) {
      mismatch("graph input " + dims_to_string(in.dims) + " does not match manifest input " +
               std::to_string(manifest.input_width) + "x" +
               std::to_string(manifest.input_height));
    }
  } else if (!in.dims.empty()) {
    mismatch("graph input must be NCHW, got " + dims_to_string(in.dims));
  }

  const auto num_classes = static_cast<std::int64_t>(manifest.class_names.size());
  const auto& d = manifest.decode;
  auto require = [&](const std::string& name) -> const TensorInfo& {
    const TensorInfo* info = signature.find_output(name);
    if (!info) mismatch("graph has no output named '" + name + "'");
    return *info;
  };

  if (d.variant == DecodeVariant::kCombinedGrid) {
    const auto& out = require(d.output_name);
    if (out.dims.empty()) return;
    auto dims = core_dims(out, 2);
    if (dims.size() != 2) mismatch("combined_grid output must be rank 2 or 3, got " + dims_to_string(out.dims));
    const auto channels = d.layout == GridLayout::kChannelsFirst ? dims[0] : dims[1];
    if (!dim_is(channels, 4 + num_classes)) {
      mismatch("combined_grid output " + dims_to_string(out.dims) + " needs " +
               std::to_string(4 + num_classes) + " channels for " +
               std::to_string(num_classes) + " class(es)");
    }
    return;
  }

  const auto& boxes = require(d.boxes_name);
  const auto& scores = require(d.scores_name);
  const auto& labels = require(d.labels_name);
  if (!boxes.dims.empty()) {
    auto dims = core_dims(boxes, 2);
    if (dims.size() != 2 || !dim_is(dims[1], 4)) {
      mismatch("triplet boxes output must be [N,4], got " + dims_to_string(boxes.dims));
    }
  }
  for (const TensorInfo* t : {&scores, &labels}) {
    if (!t->dims.empty() && core_dims(*t, 1).size() != 1) {
      mismatch("triplet output '" + t->name + "' must be [N], got " + dims_to_string(t->dims));
    }
  }
}

struct ModelRegistry::Entry {
  explicit Entry(ModelDescriptor d) : descriptor(std::move(d)) {}

  ModelDescriptor descriptor;
  std::mutex session_mutex;  // serializes inference and session lifetime
  std::shared_ptr<InferenceSession> session;
  std::atomic<bool> release_pending{false};
};

ModelRegistry::ModelRegistry()
    : ModelRegistry([](const ModelDescriptor& d) -> std::shared_ptr<InferenceSession> {
        return make_opencv_session(d.manifest.file_path, d.required_outputs());
      }) {}

ModelRegistry::ModelRegistry(SessionFactory factory) : factory_(std::move(factory)) {}

ModelRegistry::~ModelRegistry() = default;

ModelDescriptor ModelRegistry::register_model(ModelManifest manifest) {
  manifest.validate();
  GraphSignature signature = read_onnx_signature(manifest.file_path);
  validate_signature(manifest, signature);
  ModelDescriptor desc{std::move(manifest), std::move(signature)};

  std::unique_lock lock(mutex_);
  if (entries_.contains(desc.id())) {
    throw Error(ErrorCode::kDuplicateModelId, "model id already registered: " + desc.id());
  }
  entries_.emplace(desc.id(), std::make_shared<Entry>(desc));
  return desc;
}

ModelDescriptor ModelRegistry::activate_model(const std::string& model_id) {
  std::shared_ptr<Entry> previous;
  std::shared_ptr<Entry> next;
  {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(model_id);
    if (it == entries_.end()) {
      throw Error(ErrorCode::kUnknownModelId, "unknown model id: " + model_id);
    }
    next = it->second;
    if (active_ && *active_ != model_id) {
      auto prev = entries_.find(*active_);
      if (prev != entries_.end()) previous = prev->second;
    }
    active_ = model_id;
    next->release_pending = false;
  }
  if (previous) {
    previous->release_pending = true;
    release_if_idle(*previous);
  }
  return next->descriptor;
}

void ModelRegistry::release_if_idle(Entry& e) {
  if (!e.release_pending) return;
  std::unique_lock lock(e.session_mutex, std::try_to_lock);
  if (!lock.owns_lock()) return;  // the running inference releases on exit
  if (e.release_pending.exchange(false)) e.session.reset();
}

std::vector<ModelDescriptor> ModelRegistry::list_models() const {
  std::shared_lock lock(mutex_);
  std::vector<ModelDescriptor> out;
  out.reserve(entries_.size());
  for (const auto& [id, e] : entries_) out.push_back(e->descriptor);
  return out;
}

std::optional<std::string> ModelRegistry::active_model_id() const {
  std::shared_lock lock(mutex_);
  return active_;
}

std::optional<ModelDescriptor> ModelRegistry::find(const std::string& model_id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(model_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second->descriptor;
}

bool ModelRegistry::session_loaded(const std::string& model_id) const {
  auto e = entry(model_id);
  std::lock_guard lock(e->session_mutex);
  return e->session != nullptr;
}

std::shared_ptr<ModelRegistry::Entry> ModelRegistry::entry(const std::string& model_id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(model_id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownModelId, "unknown model id: " + model_id);
  }
  return it->second;
}

InferenceResult ModelRegistry::run_inference(const std::optional<std::string>& model_id,
                                             const Raster& image,
                                             const InferenceOptions& options) {
  std::string id;
  if (model_id && !model_id->empty()) {
    id = *model_id;
  } else {
    auto active = active_model_id();
    if (!active) throw Error(ErrorCode::kUnknownModelId, "no active model");
    id = *active;
  }
  std::shared_ptr<Entry> e = entry(id);
  const ModelManifest& manifest = e->descriptor.manifest;

  InferenceResult result;
  result.model_id = id;
  result.image_width = image.width;
  result.image_height = image.height;
  result.confidence_threshold =
      std::clamp(options.confidence.value_or(manifest.default_confidence), 0.0, 1.0);
  result.nms_iou = std::clamp(options.nms_iou.value_or(manifest.default_nms_iou), 0.0, 1.0);

  auto start = Clock::now();
  auto [tensor, transform] = preprocess(image, manifest);
  result.latency.preprocess_ms = ms_since(start);

  TensorMap outputs;
  {
    std::lock_guard lock(e->session_mutex);
    if (!e->session) {
      e->session = factory_(e->descriptor);
      if (!e->session) throw Error(ErrorCode::kInferenceFailure, "session factory returned null");
    }
    start = Clock::now();
    outputs = e->session->run(tensor);
    result.latency.forward_ms = ms_since(start);
  }
  release_if_idle(*e);

  start = Clock::now();
  auto decoded = decode_output(outputs, manifest.decode, transform, manifest.class_names.size());
  auto confident = detection::filter_by_confidence(decoded, result.confidence_threshold);
  result.detections = detection::nms(confident, result.nms_iou, /*per_class=*/true);
  result.latency.postprocess_ms = ms_since(start);
  return result;
}

}  // namespace ayc::runtime
