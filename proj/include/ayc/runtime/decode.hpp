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

#include <vector>

#include "ayc/detection/box.hpp"
#include "ayc/runtime/manifest.hpp"
#include "ayc/runtime/preprocess.hpp"
#include "ayc/runtime/tensor.hpp"

namespace ayc::runtime {

/// Turns raw model outputs into detections in original-image coordinates.
///
/// combined_grid candidates take class = argmax score (lowest index on ties)
/// and confidence = that score. Triplet boxes pass through with their paired
/// score and label. Every box is mapped through the inverse letterbox and
/// clamped to the image; confidences are clamped to [0, 1]. No thresholding
/// happens here.
///
/// Throws Error(kShapeMismatch) when outputs are missing or disagree with
/// `spec` or `num_classes`.
std::vector<detection::Detection> decode_output(const TensorMap& outputs,
                                                const DecodeSpec& spec,
                                                const PreprocessTransform& transform,
                                                std::size_t num_classes);

}  // namespace ayc::runtime
