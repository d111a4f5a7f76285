// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "bss/axis_map.hpp"
#include "bss/image.hpp"

namespace bss {

/// A sampled, shape-preserving linear image transform. `forward` produces the
/// transformed image; `backward` applies the adjoint, pulling a gradient with
/// respect to the output back to the input.
class Warp {
 public:
  virtual ~Warp() = default;
  virtual ImageTensor forward(const ImageTensor& img) const = 0;
  virtual ImageTensor backward(const ImageTensor& grad) const = 0;
};

class IdentityWarp final : public Warp {
 public:
  ImageTensor forward(const ImageTensor& img) const override { return img; }
  ImageTensor backward(const ImageTensor& grad) const override { return grad; }
};

/// Multiplies every value by a constant.
class ScaleWarp final : public Warp {
 public:
  explicit ScaleWarp(float factor) : factor_(factor) {}
  float factor() const { return factor_; }
  ImageTensor forward(const ImageTensor& img) const override;
  ImageTensor backward(const ImageTensor& grad) const override;

 private:
  float factor_;
};

/// Sequence of 1-D axis maps applied in order; the adjoint runs them in
/// reverse. BSS and resize-and-pad both reduce to this form.
class SeparableWarp final : public Warp {
 public:
  SeparableWarp() = default;
  void add_step(Axis axis, AxisMap map) { steps_.emplace_back(axis, std::move(map)); }
  const std::vector<std::pair<Axis, AxisMap>>& steps() const { return steps_; }

  ImageTensor forward(const ImageTensor& img) const override;
  ImageTensor backward(const ImageTensor& grad) const override;

 private:
  std::vector<std::pair<Axis, AxisMap>> steps_;
};

/// General per-pixel bilinear gather, shared by all channels. Each output
/// pixel reads up to four source pixels; an invalid tap yields zero.
class PixelWarp final : public Warp {
 public:
  struct Tap {
    int y0 = -1, x0 = -1, y1 = -1, x1 = -1;
    float fy = 0.0f, fx = 0.0f;
    bool valid() const { return y0 >= 0; }
  };

  PixelWarp(int height, int width, std::vector<Tap> taps);

  ImageTensor forward(const ImageTensor& img) const override;
  ImageTensor backward(const ImageTensor& grad) const override;

 private:
  int height_;
  int width_;
  std::vector<Tap> taps_;
};

}  // namespace bss
