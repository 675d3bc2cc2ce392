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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ayc::eval {

enum class LossSplit { kTrain, kVal };

struct LossPoint {
  int epoch = 0;
  LossSplit split = LossSplit::kTrain;
  double loss = 0.0;
};

/// Loss curve ingested from a training log. Epochs strictly increase per split.
struct LossSeries {
  std::string model_id;
  std::vector<LossPoint> points;
};

/// Parses a CSV training log whose header names at least `epoch`, `split`
/// (train|val) and `loss` columns, in any order; other columns are ignored.
/// Errors: MalformedLog, NonMonotoneEpochs.
LossSeries ingest_training_log(std::string_view csv, const std::string& model_id);

nlohmann::json to_json(const LossSeries& series);
LossSeries loss_series_from_json(const nlohmann::json& doc);

}  // namespace ayc::eval
