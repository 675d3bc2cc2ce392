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
#include <thread>

#include <doctest.h>

#include "ayc/annotations/store.hpp"
#include "test_util.hpp"

using namespace ayc;
using namespace ayc::annotations;
using testutil::error_code_of;

TEST_SUITE("store") {
  TEST_CASE("commit, conflict and audit length") {
    AnnotationStore store;
    store.ensure_image("a", 100, 100);
    auto s = store.commit("a", {AddBox{{1, 1, 10, 10}, 0}, 0});
    CHECK(s.revision == 1);
    CHECK(error_code_of([&] { store.commit("a", {AddBox{{1, 1, 10, 10}, 0}, 0}); }) ==
          ErrorCode::kRevisionConflict);
    s = store.commit("a", {AddBox{{20, 20, 30, 30}, 0}, 1});
    CHECK(store.get("a")->revision == 2);
    CHECK(store.audit_log("a").size() == 2);
    CHECK(error_code_of([&] { store.commit("zz", {AddBox{{1, 1, 2, 2}, 0}, 0}); }) == ErrorCode::kUnknownImageId);
    CHECK(error_code_of([&] { store.commit("a", {AddBox{{1, 1, 2, 2}, 5}, 2}); }) == ErrorCode::kUnknownClass);
  }

  TEST_CASE("concurrent edits at the same revision: exactly one wins") {
    AnnotationStore store;
    store.ensure_image("a", 100, 100);
    for (int round = 0; round < 20; ++round) {
      const auto rev = store.get("a")->revision;
      std::atomic<int> wins{0}, conflicts{0};
      std::vector<std::thread> threads;
      for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
          try {
            store.commit("a", {AddBox{{1.0 * t, 1, 10, 10}, 0}, rev});
            ++wins;
          } catch (const Error& e) {
            if (e.code() == ErrorCode::kRevisionConflict) ++conflicts;
          }
        });
      }
      for (auto& t : threads) t.join();
      CHECK(wins == 1);
      CHECK(conflicts == 3);
    }
    CHECK(store.get("a")->revision == 20);
  }

  TEST_CASE("snapshots are immutable") {
    AnnotationStore store;
    store.ensure_image("a", 100, 100);
    const auto before = store.get("a");
    store.commit("a", {AddBox{{1, 1, 10, 10}, 0}, 0});
    CHECK(before->boxes.empty());
    CHECK(store.get("a")->boxes.size() == 1);
  }

  TEST_CASE("replay reconstructs the current set") {
    AnnotationStore store;
    AnnotationSet seed;
    seed.image_id = "a";
    seed.image_width = 200;
    seed.image_height = 200;
    seed.boxes.push_back({"i0", {5, 5, 50, 50}, 0, Provenance::kHuman});
    store.import_sets({seed}, {"chromosome"});
    store.commit("a", {AcceptDetections{{{{60, 60, 90, 90}, 0, 0.8}}}, 0});
    store.commit("a", {AdjustBox{"i0", {6, 6, 51, 51}}, 1});
    store.commit("a", {RemoveBox{"b1.0"}, 2});
    store.commit("a", {AddBox{{100, 100, 150, 120}, 0}, 3});
    CHECK(store.replay("a") == *store.get("a"));
  }

  TEST_CASE("project store persists and reloads") {
    testutil::TempDir dir;
    {
      AnnotationStore store(dir.path());
      store.ensure_image("a", 64, 48);
      store.ensure_image("b", 32, 32);
      store.commit("a", {AddBox{{1, 2, 3, 4}, 0}, 0});
      store.commit("a", {AcceptDetections{{{{10, 10, 20, 20}, 0, 0.9}}}, 1});
    }
    CHECK(std::filesystem::exists(dir / "annotations.json"));
    CHECK(std::filesystem::exists(dir / "audit.log"));
    AnnotationStore reloaded(dir.path());
    const auto a = reloaded.get("a");
    REQUIRE(a);
    CHECK(a->revision == 2);
    CHECK(a->boxes.size() == 2);
    CHECK(a->boxes[1].provenance == Provenance::kModelAccepted);
    CHECK(reloaded.audit_log("a").size() == 2);
    CHECK(reloaded.replay("a") == *a);
    CHECK(reloaded.get("b")->image_width == 32);
    CHECK(reloaded.commit("a", {RemoveBox{"b1.0"}, 2}).revision == 3);
  }

  TEST_CASE("export of the whole store") {
    AnnotationStore store;
    store.ensure_image("a", 640, 480);
    store.commit("a", {AddBox{{288, 224, 352, 256}, 0}, 0});
    CHECK(store.export_all(Format::kYolo).at("a.txt") == "0 0.500000 0.500000 0.100000 0.066667\n");
  }
}
