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
#include <memory>
#include <string>
#include <vector>

#include "ayc/runtime/tensor.hpp"

namespace ayc::runtime {

/// One loaded model graph. Implementations need not be thread-safe; the
/// registry serializes calls per session.
class InferenceSession {
 public:
  virtual ~InferenceSession() = default;

  /// Runs a forward pass and returns the requested outputs by name.
  /// Throws Error(kInferenceFailure) on engine errors.
  virtual TensorMap run(const Tensor& input) = 0;
};

/// Loads `model_file` with OpenCV's DNN ONNX importer. Throws
/// Error(kInferenceFailure) when the engine rejects the graph.
std::unique_ptr<InferenceSession> make_opencv_session(
    const std::filesystem::path& model_file, std::vector<std::string> output_names);

}  // namespace ayc::runtime
