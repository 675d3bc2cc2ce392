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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ayc::runtime {

inline constexpr std::int64_t kDynamicDim = -1;

/// Name, element type and (possibly partially dynamic) shape of a graph
/// input or output. Symbolic or missing dimensions are `kDynamicDim`.
struct TensorInfo {
  std::string name;
  int elem_type = 0;
  std::vector<std::int64_t> dims;
};

/// The externally visible interface of an ONNX-format graph.
struct GraphSignature {
  std::int64_t ir_version = 0;
  std::string graph_name;
  std::size_t node_count = 0;
  std::vector<TensorInfo> inputs;   // excludes initializer-backed inputs
  std::vector<TensorInfo> outputs;

  const TensorInfo* find_output(const std::string& name) const;
};

/// Reads only the protobuf fields needed to describe graph inputs and
/// outputs. Throws Error(kInvalidModelFile) on malformed wire data or when
/// the message carries no graph with at least one output.
GraphSignature parse_onnx_signature(std::span<const std::uint8_t> bytes);

/// Throws Error(kFileNotFound) when `path` does not exist.
GraphSignature read_onnx_signature(const std::filesystem::path& path);

}  // namespace ayc::runtime
