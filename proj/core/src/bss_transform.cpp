// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/bss_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bss/error.hpp"

namespace bss {

std::string to_string(TargetLengthMode mode) {
  return mode == TargetLengthMode::TotalShare ? "total" : "literal";
}

TargetLengthMode parse_target_length_mode(const std::string& s) {
  if (s == "total" || s == "total-share") return TargetLengthMode::TotalShare;
  if (s == "literal" || s == "per-block") return TargetLengthMode::PerBlockLiteral;
  throw ArgumentError("unknown target length mode '" + s + "' (expected total|literal)");
}

std::vector<double> sample_factors(int count, double r, Rng& rng) {
  if (!(r >= 0.0 && r <= 2.0)) {
    throw ArgumentError("range-to-center ratio r must lie in [0, 2], got " + std::to_string(r));
  }
  if (count < 1) throw ArgumentError("sample_factors needs count >= 1");
  const double lo = (1.0 - r / 2.0) / 2.0;
  const double hi = (1.0 + r / 2.0) / 2.0;
  std::vector<double> s(count);
  for (double& v : s) v = rng.uniform(lo, hi);
  return s;
}

std::vector<double> normalize_weights(std::span<const double> factors) {
  const double sum = std::accumulate(factors.begin(), factors.end(), 0.0);
  if (!(sum > 0.0)) throw NumericError("stretch factors sum to zero; weights undefined");
  std::vector<double> w(factors.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = factors[i] / sum;
  return w;
}

std::vector<int> target_lengths(std::span<const int> lengths, std::span<const double> weights,
                                int total, TargetLengthMode mode) {
  if (lengths.size() != weights.size()) {
    throw ArgumentError("target_lengths: " + std::to_string(lengths.size()) + " lengths vs " +
                        std::to_string(weights.size()) + " weights");
  }
  std::vector<int> out(lengths.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double base = mode == TargetLengthMode::TotalShare ? total : lengths[i];
    out[i] = static_cast<int>(std::lround(base * weights[i]));
  }
  return out;
}

std::vector<int> adjust_lengths(std::span<const int> targets, int total) {
  const int n = static_cast<int>(targets.size());
  if (n < 1) throw ArgumentError("adj needs at least one block");
  if (total < n) {
    throw InfeasibleError("cannot give " + std::to_string(n) + " blocks length >= 1 within L=" +
                          std::to_string(total));
  }
  std::vector<int> out(n);
  long long sum = 0;
  for (int i = 0; i < n; ++i) {
    out[i] = std::max(targets[i], 1);
    sum += out[i];
  }
  const std::vector<int> clamped = out;

  if (sum < total) {
    // Deficit goes round-robin to the blocks tied for the largest target.
    const int top = *std::max_element(clamped.begin(), clamped.end());
    std::vector<int> tied;
    for (int i = 0; i < n; ++i) {
      if (clamped[i] == top) tied.push_back(i);
    }
    const long long deficit = total - sum;
    const long long k = static_cast<long long>(tied.size());
    for (long long j = 0; j < k; ++j) {
      out[tied[j]] += static_cast<int>(deficit / k + (j < deficit % k ? 1 : 0));
    }
  } else if (sum > total) {
    // Surplus is taken from the smallest size class above 1 first, round-robin
    // within the class; a class is exhausted once all its blocks reach 1.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return clamped[a] < clamped[b]; });
    long long surplus = sum - total;
    std::size_t pos = 0;
    while (surplus > 0 && pos < order.size()) {
      const int value = clamped[order[pos]];
      std::size_t end = pos;
      while (end < order.size() && clamped[order[end]] == value) ++end;
      if (value > 1) {
        const long long k = static_cast<long long>(end - pos);
        const long long capacity = k * (value - 1);
        if (surplus >= capacity) {
          for (std::size_t j = pos; j < end; ++j) out[order[j]] = 1;
          surplus -= capacity;
        } else {
          // Members of a class are visited in index order; stable_sort kept it.
          for (long long j = 0; j < k; ++j) {
            out[order[pos + j]] -= static_cast<int>(surplus / k + (j < surplus % k ? 1 : 0));
          }
          surplus = 0;
        }
      }
      pos = end;
    }
  }
  return out;
}

StretchPlan plan_stretch(const SegmentationPlan& plan, const BssConfig& cfg, Rng& rng) {
  StretchPlan sp;
  sp.factors = sample_factors(plan.num_blocks(), cfg.r, rng);
  sp.weights = normalize_weights(sp.factors);
  sp.targets = target_lengths(plan.block_lengths(), sp.weights, plan.length(), cfg.target_mode);
  sp.adjusted = adjust_lengths(sp.targets, plan.length());
  return sp;
}

AxisMap stretch_axis_map(const SegmentationPlan& plan, std::span<const int> adjusted) {
  if (static_cast<int>(adjusted.size()) != plan.num_blocks()) {
    throw ArgumentError("stretch map needs one adjusted length per block");
  }
  AxisMap map(plan.length(), {});
  const auto& bounds = plan.boundaries();
  for (int i = 0; i < plan.num_blocks(); ++i) {
    map.append(AxisMap::bilinear(plan.block_lengths()[i], adjusted[i]), bounds[i]);
  }
  return map;
}

ImageTensor stretch_axis(const ImageTensor& img, const SegmentationPlan& plan,
                         const BssConfig& cfg, Rng& rng) {
  if (img.extent(plan.axis()) != plan.length()) {
    throw ShapeError("stretch_axis: plan length " + std::to_string(plan.length()) +
                     " does not match " + to_string(plan.axis()) + " extent " +
                     std::to_string(img.extent(plan.axis())));
  }
  const StretchPlan sp = plan_stretch(plan, cfg, rng);
  return apply_axis_map(img, stretch_axis_map(plan, sp.adjusted), plan.axis());
}

SeparableWarp sample_bss_warp(const Shape& shape, const BssConfig& cfg, Rng& rng) {
  const int m = cfg.seg.num_pairs;
  if (shape.height < m + 1 || shape.width < m + 1) {
    throw ShapeError("image " + to_string(shape) + " too small for " + std::to_string(m + 1) +
                     " blocks per axis");
  }
  const PointSet points = sample_points(cfg.seg, shape.width, shape.height, rng);
  const Axis first = rng.coin() ? Axis::Height : Axis::Width;
  SeparableWarp warp;
  const int passes = cfg.axes == AxesMode::TwoAxis ? 2 : 1;
  Axis axis = first;
  for (int pass = 0; pass < passes; ++pass) {
    const SegmentationPlan plan = plan_from_points(points, axis, shape.extent(axis));
    const StretchPlan sp = plan_stretch(plan, cfg, rng);
    warp.add_step(axis, stretch_axis_map(plan, sp.adjusted));
    axis = orthogonal(axis);
  }
  return warp;
}

ImageTensor bss_transform(const ImageTensor& img, const BssConfig& cfg, Rng& rng) {
  return sample_bss_warp(img.shape(), cfg, rng).forward(img);
}

std::vector<ImageTensor> transform_set(const ImageTensor& img, const BssConfig& cfg,
                                       const Rng& stream) {
  if (cfg.num_transforms < 1) throw ArgumentError("transform_set needs N >= 1");
  std::vector<ImageTensor> out;
  out.reserve(cfg.num_transforms);
  for (int k = 0; k < cfg.num_transforms; ++k) {
    Rng rng = stream.child(static_cast<std::uint64_t>(k));
    out.push_back(bss_transform(img, cfg, rng));
  }
  return out;
}

}  // namespace bss
