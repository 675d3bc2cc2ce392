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

#include "ayc/core/error.hpp"

namespace ayc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kInvalidModelFile: return "InvalidModelFile";
    case ErrorCode::kSignatureMismatch: return "SignatureMismatch";
    case ErrorCode::kDuplicateModelId: return "DuplicateModelId";
    case ErrorCode::kUnknownModelId: return "UnknownModelId";
    case ErrorCode::kUnsupportedImageFormat: return "UnsupportedImageFormat";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInferenceFailure: return "InferenceFailure";
    case ErrorCode::kInvalidManifest: return "InvalidManifest";
    case ErrorCode::kUnknownClassId: return "UnknownClassId";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMalformedLog: return "MalformedLog";
    case ErrorCode::kNonMonotoneEpochs: return "NonMonotoneEpochs";
    case ErrorCode::kRevisionConflict: return "RevisionConflict";
    case ErrorCode::kUnknownBoxId: return "UnknownBoxId";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kDimsMissing: return "DimsMissing";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInconsistentDims: return "InconsistentDims";
    case ErrorCode::kUnknownImageId: return "UnknownImageId";
    case ErrorCode::kDirUnreadable: return "DirUnreadable";
    case ErrorCode::kDuplicateImageId: return "DuplicateImageId";
    case ErrorCode::kBadRatios: return "BadRatios";
    case ErrorCode::kTooFewImages: return "TooFewImages";
    case ErrorCode::kMissingAnnotations: return "MissingAnnotations";
    case ErrorCode::kSplitMissing: return "SplitMissing";
    case ErrorCode::kPortInUse: return "PortInUse";
    case ErrorCode::kProjectDirUnwritable: return "ProjectDirUnwritable";
    case ErrorCode::kBadRequest: return "BadRequest";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUnknownRunId: return "UnknownRunId";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownModelId:
    case ErrorCode::kUnknownBoxId:
    case ErrorCode::kUnknownImageId:
    case ErrorCode::kUnknownRunId:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kRevisionConflict:
      return 409;
    case ErrorCode::kFileNotFound:
    case ErrorCode::kDuplicateModelId:
    case ErrorCode::kInvalidModelFile:
    case ErrorCode::kSignatureMismatch:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kInferenceFailure:
    case ErrorCode::kInvalidManifest:
      return 422;
    case ErrorCode::kPortInUse:
    case ErrorCode::kProjectDirUnwritable:
    case ErrorCode::kIoError:
    case ErrorCode::kInternal:
    case ErrorCode::kDirUnreadable:
      return 500;
    default:
      return 400;
  }
}

nlohmann::json to_api_error(const Error& e) {
  nlohmann::json body = to_api_error(e.code(), e.what());
  if (!e.details().is_null()) body["details"] = e.details();
  return body;
}

nlohmann::json to_api_error(ErrorCode code, std::string_view message) {
  return {{"code", std::string(to_string(code))}, {"message", std::string(message)}};
}

}  // namespace ayc
