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

#include <chrono>
#include <thread>

#include <doctest.h>
#include <httplib.h>

#include "ayc/service/server.hpp"
#include "test_util.hpp"

using namespace ayc;
using nlohmann::json;
using testutil::error_code_of;

namespace {

struct Fixture {
  testutil::TempDir dir;
  std::shared_ptr<project::Workspace> ws;
  std::unique_ptr<service::Server> server;
  std::unique_ptr<httplib::Client> client;
  std::vector<std::string> bodies;  // every response body seen

  Fixture() {
    for (int i = 0; i < 8; ++i) testutil::write_png(dir / ("images/s" + std::to_string(i) + ".png"), 80, 60, 40);
    ws = std::make_shared<project::Workspace>(dir.path());
    server = std::make_unique<service::Server>(ws);
    const int port = server->bind(0);
    server->start();
    client = std::make_unique<httplib::Client>(service::kLoopbackHost, port);
  }

  std::pair<int, json> call(const std::string& method, const std::string& path, const std::string& body = "",
                            const char* type = "application/json") {
    httplib::Result r;
    if (method == "GET") r = client->Get(path);
    if (method == "POST") r = client->Post(path, body, type);
    if (method == "PUT") r = client->Put(path, body, type);
    REQUIRE(r);
    bodies.push_back(r->body);
    json doc = json::parse(r->body);
    if (r->status != 200) {
      CHECK(doc.at("code").is_string());
      CHECK(doc.at("message").is_string());
      CHECK(doc.size() <= 3);
    }
    return {r->status, doc};
  }

  std::pair<int, json> call(const std::string& method, const std::string& path, const json& body) {
    return call(method, path, body.dump());
  }

  json grid_manifest() const {
    auto doc = json::parse(fs::read_text(testutil::asset("fixture_grid.manifest.json")));
    doc["file"] = testutil::asset("fixture_grid.onnx").string();
    return doc;
  }
};

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("base64") {
    const std::string text = "any carnal pleasure.";
    const std::string enc = httplib::detail::base64_encode(text);
    const auto dec = service::base64_decode(enc);
    CHECK(std::string(dec.begin(), dec.end()) == text);
    CHECK(service::base64_decode("").empty());
    CHECK(error_code_of([] { service::base64_decode("ab$c"); }) == ErrorCode::kBadRequest);
    CHECK(error_code_of([] { service::base64_decode("a"); }) == ErrorCode::kBadRequest);
  }

  TEST_CASE("models and inference") {
    Fixture f;
    auto [s, doc] = f.call("GET", "/api/models");
    CHECK(s == 200);
    CHECK(doc.at("models").empty());
    CHECK(doc.at("active").is_null());

    std::tie(s, doc) = f.call("POST", "/api/models", f.grid_manifest());
    CHECK(s == 200);
    CHECK(doc.at("file") == "models/fixture-grid.onnx");
    std::tie(s, doc) = f.call("POST", "/api/models", f.grid_manifest());
    CHECK(s == 422);
    CHECK(doc.at("code") == "DuplicateModelId");
    auto bad = f.grid_manifest();
    bad["model_id"] = "other";
    bad["class_names"] = {"a", "b"};
    std::tie(s, doc) = f.call("POST", "/api/models", bad);
    CHECK(s == 422);
    CHECK(doc.at("code") == "SignatureMismatch");

    std::tie(s, doc) = f.call("POST", "/api/infer", json{{"image_id", "s1"}});
    CHECK(s == 404);
    CHECK(doc.at("code") == "UnknownModelId");
    std::tie(s, doc) = f.call("POST", "/api/models/nope/activate");
    CHECK(s == 404);
    std::tie(s, doc) = f.call("POST", "/api/models/fixture-grid/activate");
    CHECK(s == 200);
    CHECK(doc.at("active") == true);

    std::tie(s, doc) = f.call("POST", "/api/infer", json{{"image_id", "s1"}});
    CHECK(s == 200);
    const auto by_id = doc.at("detections");
    CHECK(by_id.size() == 2);
    const auto png = fs::read_text(f.dir / "images/s1.png");
    std::tie(s, doc) = f.call("POST", "/api/infer",
                              json{{"image", httplib::detail::base64_encode(png)}, {"model_id", "fixture-grid"}});
    CHECK(s == 200);
    CHECK(doc.at("detections") == by_id);
    std::tie(s, doc) = f.call("POST", "/api/infer", json{{"image_id", "s1"}, {"confidence", 1.0}});
    CHECK(doc.at("detections").empty());

    std::tie(s, doc) = f.call("POST", "/api/infer", json{{"image_id", "missing"}});
    CHECK(s == 404);
    CHECK(doc.at("code") == "UnknownImageId");
    std::tie(s, doc) = f.call("POST", "/api/infer", json{{"image", "aGVsbG8="}});
    CHECK(s == 400);
    CHECK(doc.at("code") == "UnsupportedImageFormat");
    std::tie(s, doc) = f.call("POST", "/api/infer", std::string("{oops"));
    CHECK(s == 400);
    CHECK(doc.at("code") == "BadRequest");

    std::tie(s, doc) = f.call("GET", "/api/models");
    CHECK(doc.at("active") == "fixture-grid");
  }

  TEST_CASE("annotations, accept and conflicts") {
    Fixture f;
    auto [s, doc] = f.call("GET", "/api/annotations/s2");
    CHECK(s == 200);
    CHECK(doc.at("revision") == 0);
    std::tie(s, doc) = f.call("PUT", "/api/annotations/s2",
                              json{{"type", "add"}, {"bbox", {1, 1, 10, 10}}, {"class_id", 0}, {"expected_revision", 0}});
    CHECK(s == 200);
    CHECK(doc.at("revision") == 1);
    std::tie(s, doc) = f.call("PUT", "/api/annotations/s2",
                              json{{"type", "add"}, {"bbox", {1, 1, 10, 10}}, {"class_id", 0}, {"expected_revision", 0}});
    CHECK(s == 409);
    CHECK(doc.at("code") == "RevisionConflict");
    CHECK(doc.at("details").at("current_revision") == 1);
    std::tie(s, doc) = f.call("POST", "/api/annotations/s2/accept",
                              json{{"detections", {{{"bbox", {20, 20, 30, 30}}, {"class_id", 0}, {"confidence", 0.8}}}},
                                   {"expected_revision", 1}});
    CHECK(s == 200);
    CHECK(doc.at("boxes")[1].at("provenance") == "model_accepted");
    std::tie(s, doc) = f.call("PUT", "/api/annotations/s2",
                              json{{"type", "remove"}, {"box_id", "nope"}, {"expected_revision", 2}});
    CHECK(s == 404);
    CHECK(doc.at("code") == "UnknownBoxId");
    std::tie(s, doc) = f.call("PUT", "/api/annotations/s2",
                              json{{"type", "add"}, {"bbox", {1, 1, 500, 10}}, {"class_id", 0}, {"expected_revision", 2}});
    CHECK(s == 400);
    CHECK(doc.at("code") == "OutOfBounds");
    std::tie(s, doc) = f.call("GET", "/api/annotations/s2/audit");
    CHECK(doc.at("records").size() == 2);
    std::tie(s, doc) = f.call("GET", "/api/annotations/zzz");
    CHECK(s == 404);
  }

  TEST_CASE("dataset, benchmarks, logs and images") {
    Fixture f;
    testutil::write_png(f.dir / "images/extra.png", 20, 20);
    auto [s, doc] = f.call("POST", "/api/dataset/scan");
    CHECK(doc.at("images").size() == 9);
    std::tie(s, doc) = f.call("POST", "/api/dataset/split", json{{"seed", 3}, {"ratios", {0.5, 0.25, 0.25}}});
    CHECK(s == 200);
    CHECK(doc.at("test").size() == 2);
    std::tie(s, doc) = f.call("POST", "/api/dataset/split", json{{"seed", 3}, {"ratios", {0.5, 0.5, 0.5}}});
    CHECK(s == 400);
    CHECK(doc.at("code") == "BadRatios");

    std::tie(s, doc) = f.call("POST", "/api/benchmarks", json{{"model_ids", {"nope"}}});
    CHECK(s == 404);
    std::tie(s, doc) = f.call("POST", "/api/benchmarks", json{{"model_ids", {"@ground_truth"}}, {"part", "test"}});
    CHECK(s == 200);
    const auto run_id = doc.at("run_id").get<std::string>();
    for (int i = 0; i < 200; ++i) {
      std::tie(s, doc) = f.call("GET", "/api/benchmarks/" + run_id);
      if (doc.at("status") == "done" || doc.at("status") == "failed") break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    CHECK(doc.at("status") == "done");
    CHECK(doc.at("report").at("ranking")[0].at("model_id") == "@ground_truth");
    std::tie(s, doc) = f.call("GET", "/api/benchmarks/run-999");
    CHECK(s == 404);
    CHECK(doc.at("code") == "UnknownRunId");

    std::tie(s, doc) = f.call("POST", "/api/logs/m1", std::string("epoch,split,loss\n1,train,0.9\n2,train,0.5\n"), "text/csv");
    CHECK(s == 200);
    std::tie(s, doc) = f.call("GET", "/api/logs/m1");
    CHECK(doc.at("points").size() == 2);
    std::tie(s, doc) = f.call("POST", "/api/logs/m1", std::string("epoch,split,loss\n2,train,0.9\n1,train,0.5\n"), "text/csv");
    CHECK(s == 400);
    CHECK(doc.at("code") == "NonMonotoneEpochs");
    std::tie(s, doc) = f.call("GET", "/api/logs/m9");
    CHECK(s == 404);

    std::tie(s, doc) = f.call("GET", "/api/images");
    CHECK(doc.at("images")[0].at("file") == "images/extra.png");
    auto raw = f.client->Get("/api/images/s3/raw");
    REQUIRE(raw);
    CHECK(raw->status == 200);
    CHECK(raw->get_header_value("Content-Type") == "image/png");
    CHECK(raw->body == fs::read_text(f.dir / "images/s3.png"));
    std::tie(s, doc) = f.call("GET", "/api/images/nope/raw");
    CHECK(s == 404);
    std::tie(s, doc) = f.call("GET", "/api/nothing/here");
    CHECK(s == 404);
    CHECK(doc.at("code") == "NotFound");

    const auto root = f.dir.path().string();
    for (const auto& body : f.bodies) CHECK(body.find(root) == std::string::npos);
  }

  TEST_CASE("busy port") {
    Fixture f;
    service::Server second(f.ws);
    CHECK(error_code_of([&] { second.bind(static_cast<std::uint16_t>(f.server->port())); }) == ErrorCode::kPortInUse);
  }
}
