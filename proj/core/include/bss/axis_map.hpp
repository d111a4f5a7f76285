// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "bss/image.hpp"

namespace bss {

/// One output sample of a 1-D linear resampling: lerp between two source
/// indices. A tap with lo < 0 produces zero (padding).
struct AxisTap {
  int lo = -1;
  int hi = -1;
  float frac = 0.0f;

  bool is_zero() const { return lo < 0; }
};

/// A 1-D linear map from `src_len` samples to `taps.size()` samples, applied
/// identically to every row (Width) or column (Height) of every channel.
/// Because it is linear, its adjoint is available for exact backpropagation.
class AxisMap {
 public:
  AxisMap() = default;
  AxisMap(int src_len, std::vector<AxisTap> taps);

  int src_len() const { return src_len_; }
  int dst_len() const { return static_cast<int>(taps_.size()); }
  const std::vector<AxisTap>& taps() const { return taps_; }

  static AxisMap identity(int len);
  /// Half-pixel-center linear resize from src_len to dst_len.
  static AxisMap bilinear(int src_len, int dst_len);

  /// Places `inner` at output offset `offset` of a longer map, shifting its
  /// source indices by `src_offset`. Used to assemble per-block maps.
  void append(const AxisMap& inner, int src_offset);

 private:
  int src_len_ = 0;
  std::vector<AxisTap> taps_;
};

/// out[..., i, ...] = lerp(in[lo_i], in[hi_i], frac_i) along `axis`.
ImageTensor apply_axis_map(const ImageTensor& img, const AxisMap& map, Axis axis);

/// Adjoint of apply_axis_map: scatters each output gradient back onto its
/// two source taps.
ImageTensor apply_axis_map_adjoint(const ImageTensor& grad, const AxisMap& map,
                                   Axis axis);

}  // namespace bss
