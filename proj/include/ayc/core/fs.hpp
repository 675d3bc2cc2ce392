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
#include <string>
#include <string_view>
#include <vector>

namespace ayc::fs {

/// Errors: IoError.
std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// Appends `line` plus a newline and flushes.
void append_line(const std::filesystem::path& path, std::string_view line);

/// `path` relative to `root` using forward slashes; the bare file name when
/// `path` lies outside `root`.
std::string display_path(const std::filesystem::path& path, const std::filesystem::path& root);

}  // namespace ayc::fs
