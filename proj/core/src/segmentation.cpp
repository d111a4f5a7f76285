// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/segmentation.hpp"

#include <algorithm>
#include <cstdlib>

#include "bss/error.hpp"

namespace bss {

bool is_feasible(const SegmentationConfig& cfg, int len) {
  if (cfg.num_pairs < 0 || cfg.border_margin < 0 || cfg.min_spacing < 0) return false;
  if (cfg.num_pairs == 0) return true;
  if (!cfg.constrained) return len - 1 >= cfg.num_pairs;
  return static_cast<long long>(cfg.num_pairs - 1) * cfg.min_spacing <=
         static_cast<long long>(len) - 2LL * cfg.border_margin;
}

void check_feasible(const SegmentationConfig& cfg, int width, int height) {
  if (cfg.num_pairs < 0 || cfg.border_margin < 0 || cfg.min_spacing < 0) {
    throw ConfigError("segmentation parameters must be non-negative (M=" +
                      std::to_string(cfg.num_pairs) + ", d_b=" +
                      std::to_string(cfg.border_margin) + ", d_p=" +
                      std::to_string(cfg.min_spacing) + ")");
  }
  for (const auto& [axis, len] : {std::pair{Axis::Width, width}, std::pair{Axis::Height, height}}) {
    if (!is_feasible(cfg, len)) {
      if (cfg.constrained) {
        throw ConfigError("infeasible segmentation on " + to_string(axis) + " axis: (M-1)*d_p = " +
                          std::to_string((cfg.num_pairs - 1) * cfg.min_spacing) +
                          " exceeds L-2*d_b = " +
                          std::to_string(len - 2 * cfg.border_margin));
      }
      throw ConfigError("cannot place " + std::to_string(cfg.num_pairs) +
                        " distinct points inside " + to_string(axis) + " extent " +
                        std::to_string(len));
    }
  }
}

namespace {

class DrawBudget {
 public:
  explicit DrawBudget(int limit) : remaining_(limit) {}
  bool take() {
    if (remaining_ == 0) return false;
    --remaining_;
    return true;
  }

 private:
  int remaining_;
};

// Draws all M coordinates at once and accepts the tuple only if every pair is
// at least `spacing` apart, which samples uniformly from the feasible set.
std::vector<int> sample_constrained_axis(int count, int lo, int hi, int spacing, Axis axis,
                                         DrawBudget& budget, Rng& rng) {
  std::vector<int> coords(count);
  std::vector<int> sorted(count);
  while (budget.take()) {
    for (int& c : coords) c = static_cast<int>(rng.uniform_int(lo, hi));
    sorted = coords;
    std::sort(sorted.begin(), sorted.end());
    bool ok = true;
    for (int i = 1; i < count && ok; ++i) ok = sorted[i] - sorted[i - 1] >= spacing;
    if (ok) return coords;
  }
  throw SamplingError("constrained point sampling exhausted its budget of " +
                      std::to_string(SegmentationConfig::kRetryBudget) + " draws on the " +
                      to_string(axis) + " axis");
}

std::vector<int> sample_random_axis(int count, int len, Axis axis, DrawBudget& budget, Rng& rng) {
  std::vector<int> coords;
  coords.reserve(count);
  while (static_cast<int>(coords.size()) < count) {
    if (!budget.take()) {
      throw SamplingError("random point sampling exhausted its budget of " +
                          std::to_string(SegmentationConfig::kRetryBudget) + " draws on the " +
                          to_string(axis) + " axis");
    }
    const int c = static_cast<int>(rng.uniform_int(1, len - 1));
    if (std::find(coords.begin(), coords.end(), c) == coords.end()) coords.push_back(c);
  }
  return coords;
}

}  // namespace

PointSet sample_points(const SegmentationConfig& cfg, int width, int height, Rng& rng) {
  check_feasible(cfg, width, height);
  const int m = cfg.num_pairs;
  if (m == 0) return {};

  DrawBudget budget(SegmentationConfig::kRetryBudget);
  std::vector<int> xs;
  std::vector<int> ys;
  if (cfg.constrained) {
    // A coordinate on the border itself would create an empty block.
    const int margin = std::max(cfg.border_margin, 1);
    const int spacing = std::max(cfg.min_spacing, 1);
    xs = sample_constrained_axis(m, margin, width - margin, spacing, Axis::Width, budget, rng);
    ys = sample_constrained_axis(m, margin, height - margin, spacing, Axis::Height, budget, rng);
  } else {
    xs = sample_random_axis(m, width, Axis::Width, budget, rng);
    ys = sample_random_axis(m, height, Axis::Height, budget, rng);
  }
  PointSet points(m);
  for (int i = 0; i < m; ++i) points[i] = {xs[i], ys[i]};
  return points;
}

SegmentationPlan::SegmentationPlan(Axis axis, int length, std::vector<int> boundaries)
    : axis_(axis), length_(length), boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2 || boundaries_.front() != 0 || boundaries_.back() != length_) {
    throw ArgumentError("segmentation boundaries must start at 0 and end at L=" +
                        std::to_string(length_));
  }
  lengths_.reserve(boundaries_.size() - 1);
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    const int len = boundaries_[i] - boundaries_[i - 1];
    if (len < 1) {
      throw DegeneratePlanError("degenerate segmentation: boundary " +
                                std::to_string(boundaries_[i]) + " repeated or out of order on " +
                                to_string(axis_) + " axis");
    }
    lengths_.push_back(len);
  }
}

SegmentationPlan plan_from_points(const PointSet& points, Axis axis, int length) {
  std::vector<int> boundaries;
  boundaries.reserve(points.size() + 2);
  boundaries.push_back(0);
  for (const auto& p : points) {
    const int c = axis == Axis::Width ? p.x : p.y;
    if (c <= 0 || c >= length) {
      throw RangeError("segmentation coordinate " + std::to_string(c) + " not inside (0, " +
                       std::to_string(length) + ") on " + to_string(axis) + " axis");
    }
    boundaries.push_back(c);
  }
  std::sort(boundaries.begin() + 1, boundaries.end());
  boundaries.push_back(length);
  return SegmentationPlan(axis, length, std::move(boundaries));
}

std::vector<ImageTensor> split(const ImageTensor& img, const SegmentationPlan& plan) {
  if (img.extent(plan.axis()) != plan.length()) {
    throw ShapeError("plan built for " + to_string(plan.axis()) + " length " +
                     std::to_string(plan.length()) + " applied to extent " +
                     std::to_string(img.extent(plan.axis())));
  }
  std::vector<ImageTensor> blocks;
  const auto& b = plan.boundaries();
  blocks.reserve(b.size() - 1);
  for (std::size_t i = 1; i < b.size(); ++i) {
    blocks.push_back(slice_axis(img, b[i - 1], b[i], plan.axis()));
  }
  return blocks;
}

}  // namespace bss
