// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/warp.hpp"

#include "bss/error.hpp"

namespace bss {

ImageTensor ScaleWarp::forward(const ImageTensor& img) const {
  ImageTensor out = img;
  for (float& v : out.data()) v *= factor_;
  return out;
}

ImageTensor ScaleWarp::backward(const ImageTensor& grad) const { return forward(grad); }

ImageTensor SeparableWarp::forward(const ImageTensor& img) const {
  ImageTensor cur = img;
  for (const auto& [axis, map] : steps_) cur = apply_axis_map(cur, map, axis);
  return cur;
}

ImageTensor SeparableWarp::backward(const ImageTensor& grad) const {
  ImageTensor cur = grad;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    cur = apply_axis_map_adjoint(cur, it->second, it->first);
  }
  return cur;
}

PixelWarp::PixelWarp(int height, int width, std::vector<Tap> taps)
    : height_(height), width_(width), taps_(std::move(taps)) {
  if (taps_.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeError("pixel warp needs one tap per output pixel");
  }
  for (const Tap& t : taps_) {
    if (!t.valid()) continue;
    if (t.y1 >= height || t.x1 >= width || t.x0 < 0 || t.y1 < 0 || t.x1 < 0 ||
        t.y0 >= height || t.x0 >= width) {
      throw RangeError("pixel warp tap outside the image");
    }
  }
}

ImageTensor PixelWarp::forward(const ImageTensor& img) const {
  if (img.height() != height_ || img.width() != width_) {
    throw ShapeError("pixel warp built for " + std::to_string(height_) + "x" +
                     std::to_string(width_) + ", got " + to_string(img.shape()));
  }
  ImageTensor out(img.shape());
  for (int c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    auto dst = out.plane(c);
    for (std::size_t p = 0; p < taps_.size(); ++p) {
      const Tap& t = taps_[p];
      if (!t.valid()) continue;
      const float a = src[static_cast<std::size_t>(t.y0) * width_ + t.x0];
      const float b = src[static_cast<std::size_t>(t.y0) * width_ + t.x1];
      const float cc = src[static_cast<std::size_t>(t.y1) * width_ + t.x0];
      const float d = src[static_cast<std::size_t>(t.y1) * width_ + t.x1];
      const float top = a + t.fx * (b - a);
      const float bot = cc + t.fx * (d - cc);
      dst[p] = top + t.fy * (bot - top);
    }
  }
  return out;
}

ImageTensor PixelWarp::backward(const ImageTensor& grad) const {
  if (grad.height() != height_ || grad.width() != width_) {
    throw ShapeError("pixel warp adjoint shape mismatch");
  }
  ImageTensor out(grad.shape());
  for (int c = 0; c < grad.channels(); ++c) {
    const auto g = grad.plane(c);
    auto dst = out.plane(c);
    for (std::size_t p = 0; p < taps_.size(); ++p) {
      const Tap& t = taps_[p];
      if (!t.valid()) continue;
      const float gy0 = (1.0f - t.fy) * g[p];
      const float gy1 = t.fy * g[p];
      dst[static_cast<std::size_t>(t.y0) * width_ + t.x0] += (1.0f - t.fx) * gy0;
      dst[static_cast<std::size_t>(t.y0) * width_ + t.x1] += t.fx * gy0;
      dst[static_cast<std::size_t>(t.y1) * width_ + t.x0] += (1.0f - t.fx) * gy1;
      dst[static_cast<std::size_t>(t.y1) * width_ + t.x1] += t.fx * gy1;
    }
  }
  return out;
}

}  // namespace bss
