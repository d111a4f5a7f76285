// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/axis_map.hpp"

#include <algorithm>
#include <cmath>

#include "bss/error.hpp"

namespace bss {

namespace {

inline float lerp_bounded(float a, float b, float frac) {
  const float v = a + frac * (b - a);
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

void check_taps(int src_len, const std::vector<AxisTap>& taps) {
  for (const auto& tap : taps) {
    if (tap.is_zero()) continue;
    if (tap.lo >= src_len || tap.hi < 0 || tap.hi >= src_len ||
        !(tap.frac >= 0.0f && tap.frac <= 1.0f)) {
      throw RangeError("axis tap out of range for source length " +
                       std::to_string(src_len));
    }
  }
}

}  // namespace

AxisMap::AxisMap(int src_len, std::vector<AxisTap> taps)
    : src_len_(src_len), taps_(std::move(taps)) {
  if (src_len < 0) throw ArgumentError("negative source length");
  check_taps(src_len_, taps_);
}

AxisMap AxisMap::identity(int len) {
  std::vector<AxisTap> taps(len);
  for (int i = 0; i < len; ++i) taps[i] = {i, i, 0.0f};
  return AxisMap(len, std::move(taps));
}

AxisMap AxisMap::bilinear(int src_len, int dst_len) {
  if (src_len < 1 || dst_len < 1) {
    throw ArgumentError("bilinear map needs positive lengths, got " +
                        std::to_string(src_len) + " -> " + std::to_string(dst_len));
  }
  const double scale = static_cast<double>(src_len) / dst_len;
  std::vector<AxisTap> taps(dst_len);
  for (int i = 0; i < dst_len; ++i) {
    double coord = (i + 0.5) * scale - 0.5;
    coord = std::clamp(coord, 0.0, static_cast<double>(src_len - 1));
    const int lo = static_cast<int>(std::floor(coord));
    const int hi = std::min(lo + 1, src_len - 1);
    const float frac = hi == lo ? 0.0f : static_cast<float>(coord - lo);
    taps[i] = {lo, hi, frac};
  }
  return AxisMap(src_len, std::move(taps));
}

void AxisMap::append(const AxisMap& inner, int src_offset) {
  if (src_offset < 0 || src_offset + inner.src_len() > src_len_) {
    throw RangeError("appended map source window exceeds source length");
  }
  for (AxisTap tap : inner.taps()) {
    if (!tap.is_zero()) {
      tap.lo += src_offset;
      tap.hi += src_offset;
    }
    taps_.push_back(tap);
  }
}

ImageTensor apply_axis_map(const ImageTensor& img, const AxisMap& map, Axis axis) {
  if (img.extent(axis) != map.src_len()) {
    throw ShapeError("axis map expects " + to_string(axis) + " extent " +
                     std::to_string(map.src_len()) + ", image has " +
                     std::to_string(img.extent(axis)));
  }
  Shape out_shape = img.shape();
  if (axis == Axis::Height) {
    out_shape.height = map.dst_len();
  } else {
    out_shape.width = map.dst_len();
  }
  ImageTensor out(out_shape);
  const auto& taps = map.taps();
  const int w_in = img.width();
  for (int c = 0; c < img.channels(); ++c) {
    const float* src = img.plane(c).data();
    float* dst = out.plane(c).data();
    if (axis == Axis::Width) {
      for (int y = 0; y < out_shape.height; ++y) {
        const float* row = src + static_cast<std::size_t>(y) * w_in;
        float* orow = dst + static_cast<std::size_t>(y) * out_shape.width;
        for (int x = 0; x < out_shape.width; ++x) {
          const AxisTap& t = taps[x];
          orow[x] = t.is_zero() ? 0.0f : lerp_bounded(row[t.lo], row[t.hi], t.frac);
        }
      }
    } else {
      for (int y = 0; y < out_shape.height; ++y) {
        const AxisTap& t = taps[y];
        float* orow = dst + static_cast<std::size_t>(y) * out_shape.width;
        if (t.is_zero()) continue;
        const float* a = src + static_cast<std::size_t>(t.lo) * w_in;
        const float* b = src + static_cast<std::size_t>(t.hi) * w_in;
        for (int x = 0; x < out_shape.width; ++x) {
          orow[x] = lerp_bounded(a[x], b[x], t.frac);
        }
      }
    }
  }
  return out;
}

ImageTensor apply_axis_map_adjoint(const ImageTensor& grad, const AxisMap& map,
                                   Axis axis) {
  if (grad.extent(axis) != map.dst_len()) {
    throw ShapeError("adjoint expects " + to_string(axis) + " extent " +
                     std::to_string(map.dst_len()) + ", gradient has " +
                     std::to_string(grad.extent(axis)));
  }
  Shape in_shape = grad.shape();
  if (axis == Axis::Height) {
    in_shape.height = map.src_len();
  } else {
    in_shape.width = map.src_len();
  }
  ImageTensor out(in_shape);
  const auto& taps = map.taps();
  for (int c = 0; c < grad.channels(); ++c) {
    const float* g = grad.plane(c).data();
    float* dst = out.plane(c).data();
    if (axis == Axis::Width) {
      for (int y = 0; y < grad.height(); ++y) {
        const float* grow = g + static_cast<std::size_t>(y) * grad.width();
        float* orow = dst + static_cast<std::size_t>(y) * in_shape.width;
        for (int x = 0; x < grad.width(); ++x) {
          const AxisTap& t = taps[x];
          if (t.is_zero()) continue;
          orow[t.lo] += (1.0f - t.frac) * grow[x];
          orow[t.hi] += t.frac * grow[x];
        }
      }
    } else {
      for (int y = 0; y < grad.height(); ++y) {
        const AxisTap& t = taps[y];
        if (t.is_zero()) continue;
        const float* grow = g + static_cast<std::size_t>(y) * grad.width();
        float* a = dst + static_cast<std::size_t>(t.lo) * in_shape.width;
        float* b = dst + static_cast<std::size_t>(t.hi) * in_shape.width;
        const float wa = 1.0f - t.frac;
        for (int x = 0; x < grad.width(); ++x) {
          a[x] += wa * grow[x];
          b[x] += t.frac * grow[x];
        }
      }
    }
  }
  return out;
}

}  // namespace bss
