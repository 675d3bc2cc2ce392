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
#include <span>
#include <utility>
#include <vector>

#include "ayc/detection/box.hpp"
#include "ayc/runtime/manifest.hpp"
#include "ayc/runtime/tensor.hpp"

namespace ayc::runtime {

inline constexpr int kLetterboxPadValue = 114;

/// Decoded 8-bit image, interleaved BGR, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bgr;

  bool empty() const { return width <= 0 || height <= 0 || bgr.empty(); }
};

/// Aspect-preserving resize plus centered padding from the original image
/// into the model input, and its inverse.
struct PreprocessTransform {
  double scale = 1.0;
  int pad_left = 0;
  int pad_top = 0;
  int resized_width = 0;
  int resized_height = 0;
  int original_width = 0;
  int original_height = 0;
  int model_width = 0;
  int model_height = 0;

  /// Original-image box to model-input space (no clamping).
  detection::BBox to_model(const detection::BBox& original) const;
  /// Model-input box to original-image space, clamped to the image bounds.
  detection::BBox to_original(const detection::BBox& model_space) const;
};

PreprocessTransform letterbox_transform(int original_width, int original_height,
                                        int model_width, int model_height);

/// Letterboxes `image` into a normalized NCHW float tensor of shape
/// [1, 3, input_height, input_width]. Throws Error(kUnsupportedImageFormat)
/// for an empty raster.
std::pair<Tensor, PreprocessTransform> preprocess(const Raster& image,
                                                  const ModelManifest& manifest);

/// Decodes PNG/JPEG/BMP/TIFF bytes. Throws Error(kUnsupportedImageFormat).
Raster decode_image(std::span<const std::uint8_t> bytes);
Raster load_image(const std::filesystem::path& path);

/// PNG-encodes a raster; used by fixtures and tests.
std::vector<std::uint8_t> encode_png(const Raster& image);

}  // namespace ayc::runtime
