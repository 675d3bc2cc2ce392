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

#include "ayc/service/server.hpp"

#include <array>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "ayc/core/error.hpp"
#include "ayc/core/fs.hpp"

namespace ayc::service {
namespace {

using nlohmann::json;
using Request = httplib::Request;
using Response = httplib::Response;

void send_json(Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kBadRequest, std::string("request body is not JSON: ") + e.what());
  }
}

template <typename T>
std::optional<T> optional_member(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || body.at(key).is_null()) return std::nullopt;
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kBadRequest, std::string("field '") + key + "' has the wrong type");
  }
}

const char* content_type_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".tif" || ext == ".tiff") return "image/tiff";
  return "application/octet-stream";
}

struct BenchmarkRun {
  std::string run_id;
  std::vector<std::string> model_ids;
  dataset::Part part = dataset::Part::kTest;
  std::string status = "pending";
  std::size_t done = 0;
  std::size_t total = 0;
  json report;
  json error;
};

}  // namespace

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  static const auto table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    const std::string_view alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (std::size_t i = 0; i < alphabet.size(); ++i) t[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    return t;
  }();
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t acc = 0;
  int bits = 0;
  bool padding = false;
  for (const char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '=') {
      padding = true;
      continue;
    }
    const int v = table[static_cast<unsigned char>(ch)];
    if (v < 0 || padding) throw Error(ErrorCode::kBadRequest, "image is not valid base64");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  if (bits >= 6) throw Error(ErrorCode::kBadRequest, "image is not valid base64");
  return out;
}

struct Server::Impl {
  explicit Impl(std::shared_ptr<project::Workspace> ws) : workspace(std::move(ws)) {
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
    worker = std::thread([this] { work(); });
  }

  ~Impl() {
    {
      std::lock_guard lock(runs_mutex);
      stopping = true;
    }
    runs_cv.notify_all();
    http.stop();
    if (listener.joinable()) listener.join();
    if (worker.joinable()) worker.join();
  }

  using Handler = std::function<json(const Request&)>;

  static httplib::Server::Handler wrap(Handler handler) {
    return [handler = std::move(handler)](const Request& req, Response& res) {
      try {
        send_json(res, 200, handler(req));
      } catch (const Error& e) {
        send_json(res, http_status(e.code()), to_api_error(e));
      } catch (const json::exception& e) {
        send_json(res, 400, to_api_error(ErrorCode::kBadRequest, e.what()));
      } catch (const std::exception& e) {
        send_json(res, 500, to_api_error(ErrorCode::kInternal, e.what()));
      }
    };
  }

  void routes() {
    auto& ws = *workspace;

    http.Get("/api/models", wrap([&ws](const Request&) {
      json models = json::array();
      for (const auto& d : ws.registry().list_models()) models.push_back(ws.describe(d));
      const auto active = ws.registry().active_model_id();
      return json{{"models", models}, {"active", active ? json(*active) : json(nullptr)}};
    }));
    http.Post("/api/models", wrap([&ws](const Request& req) {
      const auto manifest = runtime::manifest_from_json(parse_body(req), ws.layout().root);
      return ws.describe(ws.register_model(manifest));
    }));
    http.Post("/api/models/:id/activate", wrap([&ws](const Request& req) {
      return ws.describe(ws.registry().activate_model(req.path_params.at("id")));
    }));

    http.Post("/api/infer", wrap([&ws](const Request& req) {
      const json body = parse_body(req);
      runtime::Raster raster;
      if (auto image_id = optional_member<std::string>(body, "image_id")) {
        raster = runtime::load_image(ws.image(*image_id).path);
      } else if (auto inline_image = optional_member<std::string>(body, "image")) {
        const auto bytes = base64_decode(*inline_image);
        raster = runtime::decode_image(bytes);
      } else {
        throw Error(ErrorCode::kBadRequest, "infer needs 'image_id' or 'image'");
      }
      runtime::InferenceOptions opts;
      opts.confidence = optional_member<double>(body, "confidence");
      opts.nms_iou = optional_member<double>(body, "nms_iou");
      const auto result =
          ws.registry().run_inference(optional_member<std::string>(body, "model_id"), raster, opts);
      return ws.describe(result);
    }));

    http.Get("/api/annotations/:id", wrap([&ws](const Request& req) {
      const auto& id = req.path_params.at("id");
      auto set = ws.annotations().get(id);
      if (!set) throw Error(ErrorCode::kUnknownImageId, "no annotation set for image '" + id + "'");
      return annotations::to_json(*set);
    }));
    http.Put("/api/annotations/:id", wrap([&ws](const Request& req) {
      const auto edit = annotations::edit_from_json(parse_body(req));
      return annotations::to_json(ws.annotations().commit(req.path_params.at("id"), edit));
    }));
    http.Post("/api/annotations/:id/accept", wrap([&ws](const Request& req) {
      json body = parse_body(req);
      body["type"] = "accept_detections";
      const auto edit = annotations::edit_from_json(body);
      return annotations::to_json(ws.annotations().commit(req.path_params.at("id"), edit));
    }));
    http.Get("/api/annotations/:id/audit", wrap([&ws](const Request& req) {
      json records = json::array();
      for (const auto& r : ws.annotations().audit_log(req.path_params.at("id"))) {
        records.push_back(annotations::to_json(r));
      }
      return json{{"records", records}};
    }));

    http.Post("/api/dataset/scan", wrap([&ws](const Request&) {
      json images = json::array();
      for (const auto& r : ws.scan_images()) images.push_back(ws.describe(r));
      return json{{"images", images}};
    }));
    http.Post("/api/dataset/split", wrap([&ws](const Request& req) {
      const json body = parse_body(req);
      dataset::SplitRatios ratios;
      if (auto r = optional_member<std::vector<double>>(body, "ratios")) {
        if (r->size() != 3) throw Error(ErrorCode::kBadRatios, "ratios needs three entries");
        ratios = {(*r)[0], (*r)[1], (*r)[2]};
      }
      const auto seed = optional_member<std::uint64_t>(body, "seed");
      if (!seed) throw Error(ErrorCode::kBadRequest, "split needs an integer 'seed'");
      return json::parse(dataset::split_to_json_text(ws.split(ratios, *seed)));
    }));
    http.Get("/api/dataset/split", wrap([&ws](const Request&) {
      return json::parse(dataset::split_to_json_text(ws.load_split()));
    }));

    http.Post("/api/benchmarks", wrap([this](const Request& req) { return enqueue(parse_body(req)); }));
    http.Get("/api/benchmarks/:run_id", wrap([this](const Request& req) {
      return run_status(req.path_params.at("run_id"));
    }));

    http.Post("/api/logs/:model_id", wrap([&ws](const Request& req) {
      return eval::to_json(ws.ingest_log(req.path_params.at("model_id"), req.body));
    }));
    http.Get("/api/logs/:model_id", wrap([&ws](const Request& req) {
      return eval::to_json(ws.loss_series(req.path_params.at("model_id")));
    }));

    http.Get("/api/images", wrap([&ws](const Request&) {
      json images = json::array();
      for (const auto& r : ws.images()) images.push_back(ws.describe(r));
      return json{{"images", images}};
    }));
    http.Get("/api/images/:id/raw", [&ws](const Request& req, Response& res) {
      try {
        const auto record = ws.image(req.path_params.at("id"));
        const auto bytes = fs::read_bytes(record.path);
        res.status = 200;
        res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                        content_type_for(record.path));
      } catch (const Error& e) {
        send_json(res, http_status(e.code()), to_api_error(e));
      }
    });

    http.set_error_handler([](const Request& req, Response& res) {
      if (res.status == 404 && res.body.empty()) {
        send_json(res, 404, to_api_error(ErrorCode::kNotFound, "no endpoint " + req.method + " " + req.path));
      }
    });
  }

  json enqueue(const json& body) {
    auto run = std::make_shared<BenchmarkRun>();
    auto ids = optional_member<std::vector<std::string>>(body, "model_ids");
    if (!ids || ids->empty()) throw Error(ErrorCode::kEmptyInput, "benchmark needs 'model_ids'");
    for (const auto& id : *ids) {
      if (id != project::kGroundTruthModelId && !workspace->registry().find(id)) {
        throw Error(ErrorCode::kUnknownModelId, "unknown model id: " + id);
      }
    }
    run->model_ids = *ids;
    run->part = dataset::part_from_string(optional_member<std::string>(body, "part").value_or("test"));
    std::lock_guard lock(runs_mutex);
    run->run_id = "run-" + std::to_string(++run_counter);
    runs[run->run_id] = run;
    queue.push_back(run);
    runs_cv.notify_one();
    return {{"run_id", run->run_id}, {"status", run->status}};
  }

  json run_status(const std::string& run_id) {
    std::lock_guard lock(runs_mutex);
    auto it = runs.find(run_id);
    if (it == runs.end()) throw Error(ErrorCode::kUnknownRunId, "unknown benchmark run '" + run_id + "'");
    const auto& run = *it->second;
    json doc = {{"run_id", run.run_id},
                {"status", run.status},
                {"part", std::string(dataset::to_string(run.part))},
                {"model_ids", run.model_ids},
                {"progress", {{"done", run.done}, {"total", run.total}}}};
    if (!run.report.is_null()) doc["report"] = run.report;
    if (!run.error.is_null()) doc["error"] = run.error;
    return doc;
  }

  void work() {
    while (true) {
      std::shared_ptr<BenchmarkRun> run;
      {
        std::unique_lock lock(runs_mutex);
        runs_cv.wait(lock, [this] { return stopping || !queue.empty(); });
        if (stopping) return;
        run = queue.front();
        queue.pop_front();
        run->status = "running";
      }
      json report;
      json error;
      try {
        report = project::to_json(workspace->benchmark(
            run->model_ids, run->part, [this, run](std::size_t done, std::size_t total) {
              std::lock_guard lock(runs_mutex);
              run->done = done;
              run->total = total;
            }));
      } catch (const Error& e) {
        error = to_api_error(e);
      } catch (const std::exception& e) {
        error = to_api_error(ErrorCode::kInternal, e.what());
      }
      std::lock_guard lock(runs_mutex);
      run->status = error.is_null() ? "done" : "failed";
      run->report = std::move(report);
      run->error = std::move(error);
    }
  }

  std::shared_ptr<project::Workspace> workspace;
  httplib::Server http;
  int bound_port = -1;
  std::thread listener;

  std::mutex runs_mutex;
  std::condition_variable runs_cv;
  std::map<std::string, std::shared_ptr<BenchmarkRun>> runs;
  std::deque<std::shared_ptr<BenchmarkRun>> queue;
  std::uint64_t run_counter = 0;
  bool stopping = false;
  std::thread worker;
};

Server::Server(std::shared_ptr<project::Workspace> workspace)
    : impl_(std::make_unique<Impl>(std::move(workspace))) {}

Server::~Server() = default;

void Server::mount_static(const std::filesystem::path& dir) {
  if (!impl_->http.set_mount_point("/", dir.string())) {
    throw Error(ErrorCode::kDirUnreadable, "cannot serve static files from '" + dir.filename().string() + "'");
  }
}

int Server::bind(std::uint16_t port) {
  if (port == 0) {
    impl_->bound_port = impl_->http.bind_to_any_port(kLoopbackHost);
  } else if (impl_->http.bind_to_port(kLoopbackHost, port)) {
    impl_->bound_port = port;
  }
  if (impl_->bound_port <= 0) {
    throw Error(ErrorCode::kPortInUse, "cannot bind " + std::string(kLoopbackHost) + ":" + std::to_string(port),
                {{"port", port}});
  }
  return impl_->bound_port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::start() {
  impl_->listener = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void Server::stop() {
  impl_->http.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

int Server::port() const { return impl_->bound_port; }

}  // namespace ayc::service
