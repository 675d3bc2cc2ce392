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

#include "ayc/runtime/onnx_signature.hpp"

#include <fstream>
#include <iterator>
#include <set>

#include "ayc/core/error.hpp"

namespace ayc::runtime {
namespace {

// Field numbers from onnx.proto.
constexpr std::uint32_t kModelIrVersion = 1;
constexpr std::uint32_t kModelGraph = 7;
constexpr std::uint32_t kGraphNode = 1;
constexpr std::uint32_t kGraphName = 2;
constexpr std::uint32_t kGraphInitializer = 5;
constexpr std::uint32_t kGraphInput = 11;
constexpr std::uint32_t kGraphOutput = 12;
constexpr std::uint32_t kTensorProtoName = 8;
constexpr std::uint32_t kValueInfoName = 1;
constexpr std::uint32_t kValueInfoType = 2;
constexpr std::uint32_t kTypeTensor = 1;
constexpr std::uint32_t kTensorTypeElem = 1;
constexpr std::uint32_t kTensorTypeShape = 2;
constexpr std::uint32_t kShapeDim = 1;
constexpr std::uint32_t kDimValue = 1;

enum class WireType : std::uint32_t { kVarint = 0, kFixed64 = 1, kLen = 2, kFixed32 = 5 };

[[noreturn]] void malformed(const char* what) {
  throw Error(ErrorCode::kInvalidModelFile,
              std::string("not a valid ONNX model: ") + what);
}

/// Minimal protobuf wire-format cursor.
class WireReader {
 public:
  explicit WireReader(std::span<const std::uint8_t> buf) : buf_(buf) {}

  bool done() const { return pos_ >= buf_.size(); }

  std::uint64_t varint() {
    std::uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= buf_.size()) malformed("truncated varint");
      const std::uint8_t byte = buf_[pos_++];
      value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) return value;
    }
    malformed("varint too long");
  }

  std::pair<std::uint32_t, WireType> tag() {
    const std::uint64_t key = varint();
    const auto wire = static_cast<std::uint32_t>(key & 0x7);
    const auto field = static_cast<std::uint32_t>(key >> 3);
    if (field == 0) malformed("field number 0");
    if (wire != 0 && wire != 1 && wire != 2 && wire != 5) malformed("unsupported wire type");
    return {field, static_cast<WireType>(wire)};
  }

  std::span<const std::uint8_t> bytes() {
    const std::uint64_t len = varint();
    if (len > buf_.size() - pos_) malformed("length exceeds buffer");
    auto out = buf_.subspan(pos_, static_cast<std::size_t>(len));
    pos_ += static_cast<std::size_t>(len);
    return out;
  }

  std::string string() {
    auto b = bytes();
    return {b.begin(), b.end()};
  }

  void skip(WireType wire) {
    switch (wire) {
      case WireType::kVarint: varint(); return;
      case WireType::kFixed64: advance(8); return;
      case WireType::kFixed32: advance(4); return;
      case WireType::kLen: bytes(); return;
    }
  }

 private:
  void advance(std::size_t n) {
    if (n > buf_.size() - pos_) malformed("truncated fixed field");
    pos_ += n;
  }

  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

std::vector<std::int64_t> parse_shape(std::span<const std::uint8_t> buf) {
  std::vector<std::int64_t> dims;
  WireReader shape(buf);
  while (!shape.done()) {
    auto [field, wire] = shape.tag();
    if (field != kShapeDim || wire != WireType::kLen) {
      shape.skip(wire);
      continue;
    }
    std::int64_t dim = kDynamicDim;
    WireReader d(shape.bytes());
    while (!d.done()) {
      auto [df, dw] = d.tag();
      if (df == kDimValue && dw == WireType::kVarint) {
        dim = static_cast<std::int64_t>(d.varint());
      } else {
        d.skip(dw);
      }
    }
    dims.push_back(dim);
  }
  return dims;
}

TensorInfo parse_value_info(std::span<const std::uint8_t> buf) {
  TensorInfo info;
  WireReader r(buf);
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == kValueInfoName && wire == WireType::kLen) {
      info.name = r.string();
    } else if (field == kValueInfoType && wire == WireType::kLen) {
      WireReader type(r.bytes());
      while (!type.done()) {
        auto [tf, tw] = type.tag();
        if (tf != kTypeTensor || tw != WireType::kLen) {
          type.skip(tw);
          continue;
        }
        WireReader tensor(type.bytes());
        while (!tensor.done()) {
          auto [ef, ew] = tensor.tag();
          if (ef == kTensorTypeElem && ew == WireType::kVarint) {
            info.elem_type = static_cast<int>(tensor.varint());
          } else if (ef == kTensorTypeShape && ew == WireType::kLen) {
            info.dims = parse_shape(tensor.bytes());
          } else {
            tensor.skip(ew);
          }
        }
      }
    } else {
      r.skip(wire);
    }
  }
  return info;
}

std::string initializer_name(std::span<const std::uint8_t> buf) {
  WireReader r(buf);
  std::string name;
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == kTensorProtoName && wire == WireType::kLen) {
      name = r.string();
    } else {
      r.skip(wire);
    }
  }
  return name;
}

void parse_graph(std::span<const std::uint8_t> buf, GraphSignature& sig) {
  std::vector<TensorInfo> declared_inputs;
  std::set<std::string> initializers;
  WireReader r(buf);
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (wire != WireType::kLen) {
      r.skip(wire);
      continue;
    }
    switch (field) {
      case kGraphNode: r.bytes(); ++sig.node_count; break;
      case kGraphName: sig.graph_name = r.string(); break;
      case kGraphInitializer: initializers.insert(initializer_name(r.bytes())); break;
      case kGraphInput: declared_inputs.push_back(parse_value_info(r.bytes())); break;
      case kGraphOutput: sig.outputs.push_back(parse_value_info(r.bytes())); break;
      default: r.skip(wire);
    }
  }
  for (auto& in : declared_inputs) {
    if (!initializers.contains(in.name)) sig.inputs.push_back(std::move(in));
  }
}

}  // namespace

const TensorInfo* GraphSignature::find_output(const std::string& name) const {
  for (const auto& o : outputs) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

GraphSignature parse_onnx_signature(std::span<const std::uint8_t> bytes) {
  GraphSignature sig;
  bool has_graph = false;
  WireReader r(bytes);
  while (!r.done()) {
    auto [field, wire] = r.tag();
    if (field == kModelIrVersion && wire == WireType::kVarint) {
      sig.ir_version = static_cast<std::int64_t>(r.varint());
    } else if (field == kModelGraph && wire == WireType::kLen) {
      parse_graph(r.bytes(), sig);
      has_graph = true;
    } else {
      r.skip(wire);
    }
  }
  if (!has_graph) malformed("no graph");
  if (sig.outputs.empty()) malformed("graph declares no outputs");
  if (sig.ir_version <= 0) malformed("missing ir_version");
  return sig;
}

GraphSignature read_onnx_signature(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound,
                "model file not found: " + path.filename().string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open model file: " + path.filename().string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_onnx_signature(bytes);
}

}  // namespace ayc::runtime
