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

#include "ayc/eval/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ayc/core/error.hpp"

namespace ayc::eval {
namespace {

using nlohmann::json;

Outcome outcome(const MatchedDetection& m) {
  return m.true_positive ? Outcome::kTruePositive : Outcome::kFalsePositive;
}

}  // namespace

std::size_t MatchResult::tp_count() const {
  return static_cast<std::size_t>(std::count_if(
      detections.begin(), detections.end(), [](const auto& d) { return d.true_positive; }));
}

std::size_t MatchResult::fp_count() const { return detections.size() - tp_count(); }

MatchResult match_detections(std::span<const ImageDetections> detections,
                             std::span<const ImageGroundTruth> ground_truth,
                             double iou_threshold) {
  if (detections.size() != ground_truth.size()) {
    throw Error(ErrorCode::kBadRequest, "detections and ground truth disagree on image count");
  }
  MatchResult result;
  for (std::size_t img = 0; img < detections.size(); ++img) {
    const auto& dets = detections[img];
    const auto& gts = ground_truth[img];
    for (const auto& gt : gts) ++result.per_class[gt.class_id].gt_count;

    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
      return dets[l].confidence > dets[r].confidence;
    });

    std::vector<bool> taken(gts.size(), false);
    for (std::size_t di : order) {
      const Detection& d = dets[di];
      std::optional<std::size_t> best;
      double best_iou = -1.0;
      for (std::size_t gi = 0; gi < gts.size(); ++gi) {
        if (taken[gi] || gts[gi].class_id != d.class_id) continue;
        const double overlap = detection::iou(d.box, gts[gi].box);
        if (overlap >= iou_threshold && overlap > best_iou) {
          best_iou = overlap;
          best = gi;
        }
      }
      auto& counts = result.per_class[d.class_id];
      if (best) {
        taken[*best] = true;
        ++counts.tp;
      } else {
        ++counts.fp;
      }
      result.detections.push_back({img, di, d.class_id, d.confidence, best.has_value()});
    }
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (!taken[gi]) {
        ++result.per_class[gts[gi].class_id].fn;
        ++result.fn_count;
      }
    }
  }
  // Per-image blocks are already in image order and confidence-sorted within.
  std::stable_sort(result.detections.begin(), result.detections.end(),
                   [](const MatchedDetection& l, const MatchedDetection& r) {
                     return l.confidence > r.confidence;
                   });
  return result;
}

std::vector<PrPoint> precision_recall(std::span<const Outcome> flags, std::size_t total_gt) {
  std::vector<PrPoint> points;
  points.reserve(flags.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] == Outcome::kTruePositive) ++tp;
    const double recall = total_gt ? static_cast<double>(tp) / static_cast<double>(total_gt) : 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    points.push_back({recall, precision});
  }
  return points;
}

double average_precision(std::span<const Outcome> flags, std::size_t total_gt) {
  if (total_gt == 0) return 0.0;
  auto points = precision_recall(flags, total_gt);
  for (std::size_t i = points.size(); i-- > 1;) {
    points[i - 1].precision = std::max(points[i - 1].precision, points[i].precision);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : points) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return std::clamp(ap, 0.0, 1.0);
}

LatencyStats latency_stats(std::span<const double> samples_ms) {
  LatencyStats s;
  s.samples = samples_ms.size();
  if (samples_ms.empty()) return s;
  std::vector<double> sorted(samples_ms.begin(), samples_ms.end());
  std::sort(sorted.begin(), sorted.end());
  s.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.p50_ms = quantile(0.50);
  s.p95_ms = quantile(0.95);
  return s;
}

std::map<std::string, double> EvalReport::per_class_ap() const {
  std::map<std::string, double> out;
  for (const auto& c : classes) {
    if (c.ap) out[c.name] = *c.ap;
  }
  return out;
}

EvalReport map_at_iou(std::span<const ImageDetections> detections,
                      std::span<const ImageGroundTruth> ground_truth, double iou_threshold,
                      const std::vector<std::string>& class_names, std::string model_id) {
  const auto num_classes = static_cast<int>(class_names.size());
  auto check = [&](int class_id) {
    if (class_id < 0 || class_id >= num_classes) {
      throw Error(ErrorCode::kUnknownClassId,
                  "class id " + std::to_string(class_id) + " outside class list of " +
                      std::to_string(num_classes));
    }
  };
  for (const auto& image : detections)
    for (const auto& d : image) check(d.class_id);
  for (const auto& image : ground_truth)
    for (const auto& g : image) check(g.class_id);

  const MatchResult match = match_detections(detections, ground_truth, iou_threshold);

  EvalReport report;
  report.model_id = std::move(model_id);
  report.iou_threshold = iou_threshold;
  report.image_count = detections.size();

  double ap_sum = 0.0;
  std::size_t ap_classes = 0;
  for (int c = 0; c < num_classes; ++c) {
    ClassReport cr;
    cr.class_id = c;
    cr.name = class_names[static_cast<std::size_t>(c)];
    if (auto it = match.per_class.find(c); it != match.per_class.end()) cr.counts = it->second;
    std::vector<Outcome> flags;
    for (const auto& m : match.detections) {
      if (m.class_id == c) flags.push_back(outcome(m));
    }
    cr.detection_count = flags.size();
    cr.pr_points = precision_recall(flags, cr.counts.gt_count);
    if (cr.counts.gt_count > 0) {
      cr.ap = average_precision(flags, cr.counts.gt_count);
      ap_sum += *cr.ap;
      ++ap_classes;
    }
    report.tp += cr.counts.tp;
    report.fp += cr.counts.fp;
    report.fn += cr.counts.fn;
    report.classes.push_back(std::move(cr));
  }
  report.map_at_50 = ap_classes ? ap_sum / static_cast<double>(ap_classes) : 0.0;

  std::vector<Outcome> pooled;
  pooled.reserve(match.detections.size());
  for (const auto& m : match.detections) pooled.push_back(outcome(m));
  std::size_t total_gt = 0;
  for (const auto& [c, counts] : match.per_class) total_gt += counts.gt_count;
  report.pr_points = precision_recall(pooled, total_gt);
  return report;
}

std::vector<RankingRow> compare_models(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "no reports to compare");
  std::vector<RankingRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) rows.push_back({0, r.model_id, r.map_at_50, 0.0});
  std::stable_sort(rows.begin(), rows.end(), [](const RankingRow& l, const RankingRow& r) {
    if (l.map_at_50 != r.map_at_50) return l.map_at_50 > r.map_at_50;
    return l.model_id < r.model_id;
  });
  const double best = rows.front().map_at_50;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rank = i + 1;
    rows[i].delta_vs_best = rows[i].map_at_50 - best;
  }
  return rows;
}

namespace {

json pr_to_json(const std::vector<PrPoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.recall, p.precision});
  return arr;
}

std::vector<PrPoint> pr_from_json(const json& arr) {
  std::vector<PrPoint> pts;
  for (const auto& p : arr) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return pts;
}

}  // namespace

json to_json(const EvalReport& r) {
  json classes = json::array();
  json excluded = json::array();
  json per_class_ap = json::object();
  for (const auto& c : r.classes) {
    classes.push_back({{"class_id", c.class_id},
                       {"name", c.name},
                       {"ap", c.ap ? json(*c.ap) : json(nullptr)},
                       {"tp", c.counts.tp},
                       {"fp", c.counts.fp},
                       {"fn", c.counts.fn},
                       {"gt_count", c.counts.gt_count},
                       {"detection_count", c.detection_count},
                       {"pr_points", pr_to_json(c.pr_points)}});
    if (c.ap) {
      per_class_ap[c.name] = *c.ap;
    } else {
      excluded.push_back(c.name);
    }
  }
  json doc = {{"model_id", r.model_id},
              {"iou_threshold", r.iou_threshold},
              {"image_count", r.image_count},
              {"map_at_50", r.map_at_50},
              {"per_class_ap", per_class_ap},
              {"excluded_classes", excluded},
              {"tp", r.tp},
              {"fp", r.fp},
              {"fn", r.fn},
              {"pr_points", pr_to_json(r.pr_points)},
              {"classes", classes},
              {"latency_stats", nullptr}};
  if (r.latency) {
    doc["latency_stats"] = {{"samples", r.latency->samples},
                            {"mean_ms", r.latency->mean_ms},
                            {"p50_ms", r.latency->p50_ms},
                            {"p95_ms", r.latency->p95_ms}};
  }
  return doc;
}

EvalReport report_from_json(const json& doc) {
  try {
    EvalReport r;
    r.model_id = doc.at("model_id").get<std::string>();
    r.map_at_50 = doc.at("map_at_50").get<double>();
    r.iou_threshold = doc.value("iou_threshold", 0.5);
    r.image_count = doc.value("image_count", std::size_t{0});
    r.tp = doc.value("tp", std::size_t{0});
    r.fp = doc.value("fp", std::size_t{0});
    r.fn = doc.value("fn", std::size_t{0});
    if (doc.contains("pr_points")) r.pr_points = pr_from_json(doc.at("pr_points"));
    if (doc.contains("classes")) {
      for (const auto& c : doc.at("classes")) {
        ClassReport cr;
        cr.class_id = c.at("class_id").get<int>();
        cr.name = c.at("name").get<std::string>();
        if (!c.at("ap").is_null()) cr.ap = c.at("ap").get<double>();
        cr.counts = {c.value("tp", std::size_t{0}), c.value("fp", std::size_t{0}),
                     c.value("fn", std::size_t{0}), c.value("gt_count", std::size_t{0})};
        cr.detection_count = c.value("detection_count", std::size_t{0});
        if (c.contains("pr_points")) cr.pr_points = pr_from_json(c.at("pr_points"));
        r.classes.push_back(std::move(cr));
      }
    }
    if (doc.contains("latency_stats") && !doc.at("latency_stats").is_null()) {
      const auto& l = doc.at("latency_stats");
      r.latency = LatencyStats{l.value("samples", std::size_t{0}), l.at("mean_ms").get<double>(),
                               l.at("p50_ms").get<double>(), l.at("p95_ms").get<double>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed report: ") + e.what());
  }
}

json to_json(const std::vector<RankingRow>& ranking) {
  json arr = json::array();
  for (const auto& row : ranking) {
    arr.push_back({{"rank", row.rank},
                   {"model_id", row.model_id},
                   {"map_at_50", row.map_at_50},
                   {"delta_vs_best", row.delta_vs_best}});
  }
  return arr;
}

std::string format_ranking_table(const std::vector<RankingRow>& ranking) {
  std::size_t width = 8;
  for (const auto& row : ranking) width = std::max(width, row.model_id.size());
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-4s  %-*s  %9s  %9s\n", "rank", static_cast<int>(width),
                "model_id", "mAP@50", "delta");
  out += line;
  for (const auto& row : ranking) {
    std::snprintf(line, sizeof line, "%-4zu  %-*s  %8.2f%%  %+8.2f\n", row.rank,
                  static_cast<int>(width), row.model_id.c_str(), row.map_at_50 * 100.0,
                  row.delta_vs_best * 100.0);
    out += line;
  }
  return out;
}

}  // namespace ayc::eval
