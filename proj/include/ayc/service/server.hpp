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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ayc/project/workspace.hpp"

namespace ayc::service {

inline constexpr std::uint16_t kDefaultPort = 8471;
inline constexpr const char* kLoopbackHost = "127.0.0.1";

/// Standard base64 (RFC 4648) with optional padding; whitespace ignored.
/// Errors: BadRequest.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Loopback-only HTTP/JSON facade over one project workspace.
class Server {
 public:
  explicit Server(std::shared_ptr<project::Workspace> workspace);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Serves files under `dir` at `/` (the browser UI).
  void mount_static(const std::filesystem::path& dir);

  /// Binds 127.0.0.1:`port`; port 0 picks a free one. Returns the bound
  /// port. Errors: PortInUse.
  int bind(std::uint16_t port);
  /// Blocks until stop().
  void listen();
  /// Runs listen() on a background thread and waits until it accepts.
  void start();
  void stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ayc::service
