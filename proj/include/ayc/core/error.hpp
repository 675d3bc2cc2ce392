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

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace ayc {

/// Stable, machine-readable error codes shared by every module.
///
/// The string form returned by `to_string(ErrorCode)` is part of the public
/// HTTP and CLI contract and must never change for an existing code.
enum class ErrorCode {
  // model_runtime
  kFileNotFound,
  kInvalidModelFile,
  kSignatureMismatch,
  kDuplicateModelId,
  kUnknownModelId,
  kUnsupportedImageFormat,
  kShapeMismatch,
  kInferenceFailure,
  kInvalidManifest,
  // evaluation
  kUnknownClassId,
  kEmptyInput,
  kMalformedLog,
  kNonMonotoneEpochs,
  // annotation_store
  kRevisionConflict,
  kUnknownBoxId,
  kOutOfBounds,
  kUnknownClass,
  kDimsMissing,
  kParseError,
  kInconsistentDims,
  kUnknownImageId,
  // dataset_manager
  kDirUnreadable,
  kDuplicateImageId,
  kBadRatios,
  kTooFewImages,
  kMissingAnnotations,
  kSplitMissing,
  // service_api
  kPortInUse,
  kProjectDirUnwritable,
  kBadRequest,
  kNotFound,
  kUnknownRunId,
  kIoError,
  kInternal,
};

std::string_view to_string(ErrorCode code);

/// HTTP status the service answers with for `code`.
int http_status(ErrorCode code);

/// Base exception for every recoverable failure in the library.
///
/// `details` carries optional structured context (for instance the list of
/// image ids missing annotations) and is forwarded verbatim in API errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

/// ApiError body: `{"code": ..., "message": ..., "details"?: ...}`.
nlohmann::json to_api_error(const Error& e);
nlohmann::json to_api_error(ErrorCode code, std::string_view message);

}  // namespace ayc
