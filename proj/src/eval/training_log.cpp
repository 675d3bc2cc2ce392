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

#include "ayc/eval/training_log.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "ayc/core/error.hpp"

namespace ayc::eval {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kMalformedLog,
              "training log line " + std::to_string(line_no) + ": " + what);
}

const char* split_name(LossSplit s) { return s == LossSplit::kTrain ? "train" : "val"; }

std::optional<LossSplit> parse_split(std::string_view s) {
  if (s == "train") return LossSplit::kTrain;
  if (s == "val") return LossSplit::kVal;
  return std::nullopt;
}

}  // namespace

LossSeries ingest_training_log(std::string_view csv, const std::string& model_id) {
  LossSeries series{model_id, {}};
  std::size_t line_no = 0;
  std::optional<std::size_t> epoch_col, split_col, loss_col;
  std::size_t header_width = 0;
  std::map<LossSplit, int> last_epoch;

  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto nl = csv.find('\n', pos);
    std::string_view line = csv.substr(pos, nl == std::string_view::npos ? csv.npos : nl - pos);
    pos = nl == std::string_view::npos ? csv.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line);
    if (!epoch_col) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "epoch") epoch_col = i;
        if (fields[i] == "split") split_col = i;
        if (fields[i] == "loss") loss_col = i;
      }
      if (!epoch_col || !split_col || !loss_col) {
        throw Error(ErrorCode::kMalformedLog, "training log header must name epoch, split and loss");
      }
      header_width = fields.size();
      continue;
    }
    if (fields.size() < header_width) malformed(line_no, "too few columns");

    LossPoint p;
    const auto ef = fields[*epoch_col];
    auto [eptr, eerr] = std::from_chars(ef.data(), ef.data() + ef.size(), p.epoch);
    if (eerr != std::errc() || eptr != ef.data() + ef.size()) malformed(line_no, "epoch is not an integer");

    auto split = parse_split(fields[*split_col]);
    if (!split) malformed(line_no, "split must be train or val");
    p.split = *split;

    const std::string loss_text(fields[*loss_col]);
    std::size_t used = 0;
    try {
      p.loss = std::stod(loss_text, &used);
    } catch (const std::exception&) {
      malformed(line_no, "loss is not numeric");
    }
    if (used != loss_text.size() || !std::isfinite(p.loss)) malformed(line_no, "loss is not numeric");
    if (p.loss < 0.0) malformed(line_no, "loss must be nonnegative");

    auto it = last_epoch.find(p.split);
    if (it != last_epoch.end() && p.epoch <= it->second) {
      throw Error(ErrorCode::kNonMonotoneEpochs,
                  std::string("epochs must strictly increase within split '") + split_name(p.split) +
                      "' (line " + std::to_string(line_no) + ")");
    }
    last_epoch[p.split] = p.epoch;
    series.points.push_back(p);
  }
  if (!epoch_col) throw Error(ErrorCode::kMalformedLog, "training log is empty");
  return series;
}

nlohmann::json to_json(const LossSeries& series) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : series.points) {
    points.push_back({{"epoch", p.epoch}, {"split", split_name(p.split)}, {"loss", p.loss}});
  }
  return {{"model_id", series.model_id}, {"points", points}};
}

LossSeries loss_series_from_json(const nlohmann::json& doc) {
  try {
    LossSeries s;
    s.model_id = doc.at("model_id").get<std::string>();
    for (const auto& p : doc.at("points")) {
      auto split = parse_split(p.at("split").get<std::string>());
      if (!split) throw Error(ErrorCode::kParseError, "bad split in stored loss series");
      s.points.push_back({p.at("epoch").get<int>(), *split, p.at("loss").get<double>()});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed loss series: ") + e.what());
  }
}

}  // namespace ayc::eval
