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

#include "ayc/detection/box.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ayc::detection {

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Detection> filter_by_confidence(std::span<const Detection> dets,
                                            double threshold) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [threshold](const Detection& d) { return d.confidence >= threshold; });
  return out;
}

std::vector<std::size_t> confidence_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    if (dets[l].confidence != dets[r].confidence)
      return dets[l].confidence > dets[r].confidence;
    return dets[l].class_id < dets[r].class_id;
  });
  return order;
}

namespace {

// Uniform grid over kept boxes. Two boxes with positive overlap always share
// at least one cell.
class KeptGrid {
 public:
  explicit KeptGrid(std::span<const BBox> boxes) {
    double side_sum = 0.0;
    lo_x_ = lo_y_ = std::numeric_limits<double>::max();
    double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
    for (const auto& b : boxes) {
      lo_x_ = std::min(lo_x_, b.x_min);
      lo_y_ = std::min(lo_y_, b.y_min);
      hi_x = std::max(hi_x, b.x_max);
      hi_y = std::max(hi_y, b.y_max);
      side_sum += std::max(b.width(), 0.0) + std::max(b.height(), 0.0);
    }
    const double extent = std::max({hi_x - lo_x_, hi_y - lo_y_, 1e-9});
    cell_ = std::max(side_sum / (2.0 * static_cast<double>(boxes.size())), extent / kMaxCells);
    nx_ = cell_index(hi_x, lo_x_) + 1;
    ny_ = cell_index(hi_y, lo_y_) + 1;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  }

  void insert(std::size_t id, const BBox& b) {
    const int x0 = cell_index(b.x_min, lo_x_), x1 = cell_index(b.x_max, lo_x_);
    const int y0 = cell_index(b.y_min, lo_y_), y1 = cell_index(b.y_max, lo_y_);
    if ((x1 - x0 + 1) * (y1 - y0 + 1) > kMaxCellsPerBox) {
      large_.push_back(id);
      return;
    }
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(id);
  }

  template <typename F>
  bool any_near(const BBox& b, F&& pred) const {
    for (auto id : large_)
      if (pred(id)) return true;
    const int x0 = cell_index(b.x_min, lo_x_), x1 = cell_index(b.x_max, lo_x_);
    const int y0 = cell_index(b.y_min, lo_y_), y1 = cell_index(b.y_max, lo_y_);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        for (auto id : cells_[static_cast<std::size_t>(y) * nx_ + x])
          if (pred(id)) return true;
    return false;
  }

 private:
  static constexpr double kMaxCells = 512.0;
  static constexpr int kMaxCellsPerBox = 64;

  int cell_index(double v, double lo) const {
    return static_cast<int>(std::clamp(std::floor((v - lo) / cell_), 0.0, kMaxCells));
  }

  double lo_x_ = 0.0, lo_y_ = 0.0, cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::size_t> large_;
};

bool all_finite(std::span<const BBox> boxes) {
  return std::all_of(boxes.begin(), boxes.end(), [](const BBox& b) {
    return std::isfinite(b.x_min) && std::isfinite(b.y_min) && std::isfinite(b.x_max) &&
           std::isfinite(b.y_max);
  });
}

}  // namespace

std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold,
                           bool per_class) {
  const auto order = confidence_order(dets);
  std::vector<BBox> boxes;
  boxes.reserve(order.size());
  for (auto i : order) boxes.push_back(dets[i].box);

  std::vector<std::size_t> kept_pos;
  auto suppresses = [&](std::size_t k, std::size_t i) {
    if (per_class && dets[order[k]].class_id != dets[order[i]].class_id) return false;
    return iou(boxes[k], boxes[i]) >= iou_threshold;
  };

  if (iou_threshold <= 0.0 || !all_finite(boxes)) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (std::none_of(kept_pos.begin(), kept_pos.end(), [&](std::size_t k) { return suppresses(k, i); }))
        kept_pos.push_back(i);
    }
  } else if (!order.empty()) {
    KeptGrid grid(boxes);
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (grid.any_near(boxes[i], [&](std::size_t k) { return suppresses(k, i); })) continue;
      kept_pos.push_back(i);
      grid.insert(i, boxes[i]);
    }
  }

  std::vector<Detection> kept;
  kept.reserve(kept_pos.size());
  for (auto k : kept_pos) kept.push_back(dets[order[k]]);
  return kept;
}

}  // namespace ayc::detection
