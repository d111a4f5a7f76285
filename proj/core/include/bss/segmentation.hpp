// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "bss/image.hpp"
#include "bss/rng.hpp"

namespace bss {

struct SegmentationConfig {
  int num_pairs = 2;      // M
  int border_margin = 35; // d_b
  int min_spacing = 40;   // d_p
  bool constrained = true;

  /// Draw budget shared by both axes of one sample_points call.
  static constexpr int kRetryBudget = 10'000;
};

/// Checks (M - 1) * d_p <= L - 2 * d_b for an axis of length `len`.
bool is_feasible(const SegmentationConfig& cfg, int len);

/// Throws ConfigError naming the axis if either extent is infeasible.
void check_feasible(const SegmentationConfig& cfg, int width, int height);

struct PointPair {
  int x = 0;  // width coordinate
  int y = 0;  // height coordinate

  bool operator==(const PointPair&) const = default;
};

using PointSet = std::vector<PointPair>;

PointSet sample_points(const SegmentationConfig& cfg, int width, int height, Rng& rng);

/// Sorted block boundaries along one axis, including 0 and L.
class SegmentationPlan {
 public:
  SegmentationPlan(Axis axis, int length, std::vector<int> boundaries);

  Axis axis() const { return axis_; }
  int length() const { return length_; }
  const std::vector<int>& boundaries() const { return boundaries_; }
  const std::vector<int>& block_lengths() const { return lengths_; }
  int num_blocks() const { return static_cast<int>(lengths_.size()); }

 private:
  Axis axis_;
  int length_;
  std::vector<int> boundaries_;
  std::vector<int> lengths_;
};

/// Width plans read the x components of the pairs, height plans the y
/// components; one PointSet serves both axes.
SegmentationPlan plan_from_points(const PointSet& points, Axis axis, int length);

std::vector<ImageTensor> split(const ImageTensor& img, const SegmentationPlan& plan);

}  // namespace bss
