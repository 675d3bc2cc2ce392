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

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "ayc/core/error.hpp"
#include "ayc/runtime/session.hpp"

namespace ayc::runtime {
namespace {

class OpenCvSession final : public InferenceSession {
 public:
  OpenCvSession(const std::filesystem::path& model_file, std::vector<std::string> outputs)
      : output_names_(std::move(outputs)) {
    try {
      net_ = cv::dnn::readNetFromONNX(model_file.string());
      net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
      net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
    } catch (const cv::Exception& e) {
      throw Error(ErrorCode::kInferenceFailure,
                  "engine could not load " + model_file.filename().string() + ": " + e.msg);
    }
    if (net_.empty()) {
      throw Error(ErrorCode::kInferenceFailure,
                  "engine could not load " + model_file.filename().string());
    }
  }

  TensorMap run(const Tensor& input) override {
    std::vector<int> sizes(input.shape.begin(), input.shape.end());
    cv::Mat blob(static_cast<int>(sizes.size()), sizes.data(), CV_32F,
                 const_cast<float*>(input.data.data()));
    std::vector<cv::Mat> outs;
    try {
      net_.setInput(blob);
      net_.forward(outs, output_names_);
    } catch (const cv::Exception& e) {
      throw Error(ErrorCode::kInferenceFailure, "forward pass failed: " + e.msg);
    }
    TensorMap result;
    for (std::size_t i = 0; i < outs.size() && i < output_names_.size(); ++i) {
      cv::Mat m = outs[i];
      if (m.depth() != CV_32F) m.convertTo(m, CV_32F);
      if (!m.isContinuous()) m = m.clone();
      Tensor t;
      for (int d = 0; d < m.dims; ++d) t.shape.push_back(m.size[d]);
      const auto* p = m.ptr<float>();
      t.data.assign(p, p + m.total());
      result.emplace(output_names_[i], std::move(t));
    }
    return result;
  }

 private:
  cv::dnn::Net net_;
  std::vector<std::string> output_names_;
};

}  // namespace

std::unique_ptr<InferenceSession> make_opencv_session(const std::filesystem::path& model_file,
                                                      std::vector<std::string> output_names) {
  return std::make_unique<OpenCvSession>(model_file, std::move(output_names));
}

}  // namespace ayc::runtime
