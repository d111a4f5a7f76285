// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bss {

enum class Axis { Height, Width };

inline Axis orthogonal(Axis axis) {
  return axis == Axis::Height ? Axis::Width : Axis::Height;
}

std::string to_string(Axis axis);

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  int extent(Axis axis) const { return axis == Axis::Height ? height : width; }

  auto operator<=>(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

/// Dense channel-major image (C x H x W), 32-bit values. Clean images hold
/// values in [0, 1]; perturbed intermediates may leave that range until
/// clamp01 is applied.
class ImageTensor {
 public:
  ImageTensor() = default;
  explicit ImageTensor(Shape shape, float fill = 0.0f);
  ImageTensor(int channels, int height, int width, float fill = 0.0f)
      : ImageTensor(Shape{channels, height, width}, fill) {}
  ImageTensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int extent(Axis axis) const { return shape_.extent(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  std::span<float> plane(int c);
  std::span<const float> plane(int c) const;

  bool operator==(const ImageTensor&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x;
  }

  Shape shape_{};
  std::vector<float> data_;
};

/// Copies the half-open range [start, end) along `axis`.
ImageTensor slice_axis(const ImageTensor& img, int start, int end, Axis axis);

/// Concatenates blocks in order along `axis`.
ImageTensor concat_axis(std::span<const ImageTensor> blocks, Axis axis);

/// 1-D linear resampling along `axis` with half-pixel sample centers:
/// source coordinate = (i + 0.5) * src_len / new_len - 0.5, clamped to the
/// valid range. The other axis and every channel are untouched.
ImageTensor resize_axis_bilinear(const ImageTensor& img, int new_len, Axis axis);

ImageTensor clamp01(const ImageTensor& img);

float min_value(const ImageTensor& img);
float max_value(const ImageTensor& img);
float linf_norm(const ImageTensor& img);
double l1_norm(const ImageTensor& img);

ImageTensor operator+(const ImageTensor& a, const ImageTensor& b);
ImageTensor operator-(const ImageTensor& a, const ImageTensor& b);

}  // namespace bss
