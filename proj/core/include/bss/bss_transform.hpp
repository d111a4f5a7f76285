// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "bss/image.hpp"
#include "bss/rng.hpp"
#include "bss/segmentation.hpp"
#include "bss/warp.hpp"

namespace bss {

enum class AxesMode { TwoAxis, OneAxis };

/// How per-block target lengths are derived from the normalized weights.
///  - TotalShare:      l'_i = round(L * w_i)   (weights are shares of the axis)
///  - PerBlockLiteral: l'_i = round(l_i * w_i) (the per-block product)
/// adj() restores sum(l''_i) = L in both cases.
enum class TargetLengthMode { TotalShare, PerBlockLiteral };

std::string to_string(TargetLengthMode mode);
TargetLengthMode parse_target_length_mode(const std::string& s);

struct BssConfig {
  SegmentationConfig seg;
  double r = 1.0;  // range-to-center ratio, in [0, 2]
  int num_transforms = 1;
  AxesMode axes = AxesMode::TwoAxis;
  TargetLengthMode target_mode = TargetLengthMode::TotalShare;
};

/// Draws `count` stretch factors s_i ~ U((1 - r/2)/2, (1 + r/2)/2).
std::vector<double> sample_factors(int count, double r, Rng& rng);

/// w_i = s_i / sum(s).
std::vector<double> normalize_weights(std::span<const double> factors);

/// Rounds half away from zero.
std::vector<int> target_lengths(std::span<const int> lengths, std::span<const double> weights,
                                int total, TargetLengthMode mode);

/// Integer length adjustment: clamps every target to >= 1, then
///  - while the sum is short of L, adds one pixel at a time to the blocks with
///    the largest clamped target, cycling through tied blocks in index order;
///  - while the sum exceeds L, removes one pixel at a time from the blocks with
///    the smallest clamped target that are still > 1, cycling through ties in
///    index order and moving to the next size class once a class reaches 1.
/// Result: every entry >= 1 and the sum is exactly L.
std::vector<int> adjust_lengths(std::span<const int> targets, int total);

struct StretchPlan {
  std::vector<double> factors;
  std::vector<double> weights;
  std::vector<int> targets;
  std::vector<int> adjusted;
};

StretchPlan plan_stretch(const SegmentationPlan& plan, const BssConfig& cfg, Rng& rng);

/// The L -> L axis map that resizes block i of `plan` to `adjusted[i]` and
/// places the blocks back to back.
AxisMap stretch_axis_map(const SegmentationPlan& plan, std::span<const int> adjusted);

ImageTensor stretch_axis(const ImageTensor& img, const SegmentationPlan& plan,
                         const BssConfig& cfg, Rng& rng);

/// Samples one BSS transform for images of `shape`: one point set shared by
/// both axes, a fair coin for which axis goes first, and a fresh stretch plan
/// per axis. OneAxis mode stops after the first axis.
SeparableWarp sample_bss_warp(const Shape& shape, const BssConfig& cfg, Rng& rng);

ImageTensor bss_transform(const ImageTensor& img, const BssConfig& cfg, Rng& rng);

/// N independent transforms; transform k draws from stream.child(k).
std::vector<ImageTensor> transform_set(const ImageTensor& img, const BssConfig& cfg,
                                       const Rng& stream);

}  // namespace bss
