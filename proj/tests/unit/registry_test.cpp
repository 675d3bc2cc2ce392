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

#include <atomic>
#include <chrono>
#include <thread>

#include <doctest.h>

#include "ayc/runtime/registry.hpp"
#include "test_util.hpp"

using namespace ayc;
using namespace ayc::runtime;
using detection::BBox;
using testutil::error_code_of;

namespace {

// Returns the grid fixture payload without running a graph.
class FakeSession : public InferenceSession {
 public:
  explicit FakeSession(std::atomic<int>& in_flight, std::atomic<int>& overlaps, int delay_ms)
      : in_flight_(in_flight), overlaps_(overlaps), delay_ms_(delay_ms) {}

  TensorMap run(const Tensor& input) override {
    REQUIRE(input.shape == std::vector<std::int64_t>{1, 3, 640, 640});
    if (in_flight_.fetch_add(1) > 0) overlaps_.fetch_add(1);
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    in_flight_.fetch_sub(1);
    return {{"output0",
             {{1, 5, 4},
              {320, 100, 322, 500, 240, 100, 242, 400, 64, 40, 64, 30, 32, 40, 32, 30,
               0.92f, 0.30f, 0.80f, 0.10f}}}};
  }

 private:
  std::atomic<int>& in_flight_;
  std::atomic<int>& overlaps_;
  int delay_ms_;
};

struct FakeEngine {
  std::atomic<int> created{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> overlaps{0};
  int delay_ms = 0;

  ModelRegistry::SessionFactory factory() {
    return [this](const ModelDescriptor&) {
      created.fetch_add(1);
      return std::make_shared<FakeSession>(in_flight, overlaps, delay_ms);
    };
  }
};

ModelManifest grid_manifest(const std::string& id) {
  auto m = load_manifest(testutil::asset("fixture_grid.manifest.json"));
  m.model_id = id;
  return m;
}

}  // namespace

TEST_SUITE("registry") {
  TEST_CASE("register, list, duplicate") {
    FakeEngine engine;
    ModelRegistry reg(engine.factory());
    const auto d = reg.register_model(grid_manifest("a"));
    CHECK(d.signature.outputs.size() == 1);
    reg.register_model(grid_manifest("b"));
    CHECK(reg.list_models().size() == 2);
    CHECK(error_code_of([&] { reg.register_model(grid_manifest("a")); }) == ErrorCode::kDuplicateModelId);
    CHECK(engine.created == 0);
  }

  TEST_CASE("registration errors") {
    ModelRegistry reg;
    auto m = grid_manifest("x");
    m.file_path = "/nonexistent.onnx";
    CHECK(error_code_of([&] { reg.register_model(m); }) == ErrorCode::kFileNotFound);

    testutil::TempDir dir;
    fs::write_text_atomic(dir / "junk.onnx", "not a model at all");
    m.file_path = dir / "junk.onnx";
    CHECK(error_code_of([&] { reg.register_model(m); }) == ErrorCode::kInvalidModelFile);

    m = grid_manifest("x");
    m.class_names = {"a", "b"};
    CHECK(error_code_of([&] { reg.register_model(m); }) == ErrorCode::kSignatureMismatch);
    m = grid_manifest("x");
    m.input_width = 320;
    CHECK(error_code_of([&] { reg.register_model(m); }) == ErrorCode::kSignatureMismatch);
    m = grid_manifest("x");
    m.decode.output_name = "nope";
    CHECK(error_code_of([&] { reg.register_model(m); }) == ErrorCode::kSignatureMismatch);
    CHECK(reg.list_models().empty());
  }

  TEST_CASE("inference decodes, thresholds and suppresses") {
    FakeEngine engine;
    ModelRegistry reg(engine.factory());
    reg.register_model(grid_manifest("a"));
    const auto img = testutil::solid_raster(640, 640, 0, 0, 0);
    const auto r = reg.run_inference("a", img);
    REQUIRE(r.detections.size() == 2);
    CHECK(r.detections[0].box == BBox{288, 224, 352, 256});
    CHECK(r.detections[0].confidence == doctest::Approx(0.92));
    CHECK(r.detections[1].box == BBox{80, 80, 120, 120});
    CHECK(r.confidence_threshold == 0.25);

    CHECK(reg.run_inference("a", img, {0.05, std::nullopt}).detections.size() == 3);
    CHECK(reg.run_inference("a", img, {0.05, 0.99}).detections.size() == 4);
    CHECK(reg.run_inference("a", img, {2.0, std::nullopt}).detections.empty());
    CHECK(engine.created == 1);
  }

  TEST_CASE("inference needs a known or active model") {
    FakeEngine engine;
    ModelRegistry reg(engine.factory());
    reg.register_model(grid_manifest("a"));
    const auto img = testutil::solid_raster(8, 8, 0, 0, 0);
    CHECK(error_code_of([&] { reg.run_inference(std::nullopt, img); }) == ErrorCode::kUnknownModelId);
    CHECK(error_code_of([&] { reg.run_inference("zzz", img); }) == ErrorCode::kUnknownModelId);
    reg.activate_model("a");
    CHECK(reg.run_inference(std::nullopt, img).model_id == "a");
    CHECK(error_code_of([&] { reg.activate_model("zzz"); }) == ErrorCode::kUnknownModelId);
  }

  TEST_CASE("activation releases the previous session") {
    FakeEngine engine;
    ModelRegistry reg(engine.factory());
    reg.register_model(grid_manifest("a"));
    reg.register_model(grid_manifest("b"));
    const auto img = testutil::solid_raster(32, 32, 0, 0, 0);
    reg.activate_model("a");
    reg.run_inference(std::nullopt, img);
    CHECK(reg.session_loaded("a"));
    reg.activate_model("b");
    CHECK_FALSE(reg.session_loaded("a"));
    reg.run_inference(std::nullopt, img);
    CHECK(reg.session_loaded("b"));
    CHECK(*reg.active_model_id() == "b");
  }

  TEST_CASE("swap during a running inference waits for it") {
    FakeEngine engine;
    engine.delay_ms = 100;
    ModelRegistry reg(engine.factory());
    reg.register_model(grid_manifest("a"));
    reg.register_model(grid_manifest("b"));
    reg.activate_model("a");
    const auto img = testutil::solid_raster(32, 32, 0, 0, 0);
    std::size_t found = 0;
    std::thread worker([&] { found = reg.run_inference(std::nullopt, img).detections.size(); });
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    reg.activate_model("b");
    worker.join();
    CHECK(found == 2);
    CHECK_FALSE(reg.session_loaded("a"));
  }

  TEST_CASE("one model never runs two inferences at once") {
    FakeEngine engine;
    engine.delay_ms = 5;
    ModelRegistry reg(engine.factory());
    reg.register_model(grid_manifest("a"));
    const auto img = testutil::solid_raster(64, 64, 0, 0, 0);
    std::vector<std::thread> threads;
    for (int t = 0; t < 6; ++t) {
      threads.emplace_back([&] {
        for (int i = 0; i < 5; ++i) reg.run_inference("a", img);
      });
    }
    for (auto& t : threads) t.join();
    CHECK(engine.overlaps == 0);
    CHECK(engine.created == 1);
  }

  TEST_CASE("bundled fixtures run through the real engine") {
    ModelRegistry reg;
    reg.register_model(load_manifest(testutil::asset("fixture_grid.manifest.json")));
    reg.register_model(load_manifest(testutil::asset("fixture_triplet.manifest.json")));
    const auto slide = testutil::solid_raster(2048, 1536, 90, 90, 90);
    const auto grid = reg.run_inference("fixture-grid", slide);
    REQUIRE(grid.detections.size() == 2);
    CHECK(grid.detections[0].box.x_min == doctest::Approx(921.6));
    CHECK(grid.detections[0].box.y_min == doctest::Approx(460.8));
    CHECK(grid.detections[0].confidence == doctest::Approx(0.92).epsilon(1e-6));

    const auto trip = reg.run_inference("fixture-triplet", testutil::solid_raster(640, 480, 1, 2, 3));
    REQUIRE(trip.detections.size() == 2);
    CHECK(trip.detections[0].class_id == 0);
    CHECK(trip.detections[1].class_id == 1);
    CHECK(trip.detections[1].box.x_max == doctest::Approx(576));
  }
}
