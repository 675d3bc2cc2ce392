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

#include "ayc/runtime/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "ayc/core/error.hpp"

namespace ayc::runtime {

using detection::BBox;

BBox PreprocessTransform::to_model(const BBox& b) const {
  return {b.x_min * scale + pad_left, b.y_min * scale + pad_top,
          b.x_max * scale + pad_left, b.y_max * scale + pad_top};
}

BBox PreprocessTransform::to_original(const BBox& b) const {
  const double w = original_width;
  const double h = original_height;
  auto x = [&](double v) { return std::clamp((v - pad_left) / scale, 0.0, w); };
  auto y = [&](double v) { return std::clamp((v - pad_top) / scale, 0.0, h); };
  BBox out{x(b.x_min), y(b.y_min), x(b.x_max), y(b.y_max)};
  if (out.x_max < out.x_min) std::swap(out.x_min, out.x_max);
  if (out.y_max < out.y_min) std::swap(out.y_min, out.y_max);
  return out;
}

PreprocessTransform letterbox_transform(int original_width, int original_height,
                                        int model_width, int model_height) {
  PreprocessTransform t;
  t.original_width = original_width;
  t.original_height = original_height;
  t.model_width = model_width;
  t.model_height = model_height;
  t.scale = std::min(static_cast<double>(model_width) / original_width,
                     static_cast<double>(model_height) / original_height);
  t.resized_width = std::min(
      model_width, static_cast<int>(std::lround(original_width * t.scale)));
  t.resized_height = std::min(
      model_height, static_cast<int>(std::lround(original_height * t.scale)));
  t.pad_left = (model_width - t.resized_width) / 2;
  t.pad_top = (model_height - t.resized_height) / 2;
  return t;
}

std::pair<Tensor, PreprocessTransform> preprocess(const Raster& image,
                                                  const ModelManifest& manifest) {
  if (image.empty() ||
      image.bgr.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw Error(ErrorCode::kUnsupportedImageFormat, "empty or malformed raster");
  }
  const int in_w = manifest.input_width;
  const int in_h = manifest.input_height;
  PreprocessTransform t = letterbox_transform(image.width, image.height, in_w, in_h);

  const cv::Mat src(image.height, image.width, CV_8UC3,
                    const_cast<std::uint8_t*>(image.bgr.data()));
  cv::Mat canvas(in_h, in_w, CV_8UC3,
                 cv::Scalar::all(kLetterboxPadValue));
  cv::Mat roi = canvas(cv::Rect(t.pad_left, t.pad_top, t.resized_width, t.resized_height));
  if (t.resized_width == image.width && t.resized_height == image.height) {
    src.copyTo(roi);
  } else {
    cv::resize(src, roi, roi.size(), 0.0, 0.0, cv::INTER_LINEAR);
  }

  Tensor tensor;
  tensor.shape = {1, 3, in_h, in_w};
  tensor.data.resize(static_cast<std::size_t>(3) * in_h * in_w);
  const std::size_t plane = static_cast<std::size_t>(in_h) * in_w;
  const bool rgb = manifest.channel_order == ChannelOrder::kRgb;
  const auto& norm = manifest.normalization;
  // Per-channel lookup tables; BGR source channel index in `src_channel`.
  std::array<std::array<float, 256>, 3> lut{};
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) {
      lut[c][v] = static_cast<float>((v - norm.mean[c]) * norm.scale[c]);
    }
  }
  for (int y = 0; y < in_h; ++y) {
    const std::uint8_t* row = canvas.ptr<std::uint8_t>(y);
    for (int x = 0; x < in_w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * in_w + x;
      for (int c = 0; c < 3; ++c) {
        const int src_channel = rgb ? 2 - c : c;
        tensor.data[c * plane + idx] = lut[c][row[3 * x + src_channel]];
      }
    }
  }
  return {std::move(tensor), t};
}

Raster decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::kUnsupportedImageFormat, "empty image payload");
  cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1,
              const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat img;
  try {
    img = cv::imdecode(buf, cv::IMREAD_COLOR);
  } catch (const cv::Exception&) {
    img.release();
  }
  if (img.empty()) {
    throw Error(ErrorCode::kUnsupportedImageFormat, "image could not be decoded");
  }
  Raster r;
  r.width = img.cols;
  r.height = img.rows;
  if (!img.isContinuous()) img = img.clone();
  r.bgr.assign(img.data, img.data + img.total() * img.elemSize());
  return r;
}

Raster load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kUnsupportedImageFormat,
                "cannot read image " + path.filename().string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_image(bytes);
}

std::vector<std::uint8_t> encode_png(const Raster& image) {
  const cv::Mat src(image.height, image.width, CV_8UC3,
                    const_cast<std::uint8_t*>(image.bgr.data()));
  std::vector<std::uint8_t> out;
  cv::imencode(".png", src, out);
  return out;
}

}  // namespace ayc::runtime
