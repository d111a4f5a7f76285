// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bss/axis_map.hpp"
#include "bss/error.hpp"

namespace bss {

std::string to_string(Axis axis) {
  return axis == Axis::Height ? "height" : "width";
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << shape.channels << "x" << shape.height << "x" << shape.width;
  return os.str();
}

ImageTensor::ImageTensor(Shape shape, float fill) : shape_(shape) {
  if (shape.channels < 0 || shape.height < 0 || shape.width < 0) {
    throw ArgumentError("negative image extent " + to_string(shape));
  }
  data_.assign(shape.size(), fill);
}

ImageTensor::ImageTensor(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  if (shape.channels < 0 || shape.height < 0 || shape.width < 0) {
    throw ArgumentError("negative image extent " + to_string(shape));
  }
  if (data_.size() != shape.size()) {
    throw ShapeError("image data length " + std::to_string(data_.size()) +
                     " does not match shape " + to_string(shape));
  }
}

std::span<float> ImageTensor::plane(int c) {
  const std::size_t n = static_cast<std::size_t>(shape_.height) * shape_.width;
  return std::span<float>(data_).subspan(c * n, n);
}

std::span<const float> ImageTensor::plane(int c) const {
  const std::size_t n = static_cast<std::size_t>(shape_.height) * shape_.width;
  return std::span<const float>(data_).subspan(c * n, n);
}

ImageTensor slice_axis(const ImageTensor& img, int start, int end, Axis axis) {
  const int len = img.extent(axis);
  if (start < 0 || end > len || start >= end) {
    throw RangeError("slice [" + std::to_string(start) + ", " +
                     std::to_string(end) + ") invalid for " + to_string(axis) +
                     " extent " + std::to_string(len));
  }
  Shape out_shape = img.shape();
  if (axis == Axis::Height) {
    out_shape.height = end - start;
  } else {
    out_shape.width = end - start;
  }
  ImageTensor out(out_shape);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < out_shape.height; ++y) {
      const int sy = axis == Axis::Height ? y + start : y;
      const int x0 = axis == Axis::Width ? start : 0;
      const float* src = &img.plane(c)[static_cast<std::size_t>(sy) * img.width() + x0];
      std::copy_n(src, out_shape.width, &out.at(c, y, 0));
    }
  }
  return out;
}

ImageTensor concat_axis(std::span<const ImageTensor> blocks, Axis axis) {
  if (blocks.empty()) {
    throw ArgumentError("concat_axis needs at least one block");
  }
  const Shape& first = blocks.front().shape();
  Shape out_shape = first;
  int total = 0;
  for (const auto& block : blocks) {
    const Shape& s = block.shape();
    const bool off_axis_ok = axis == Axis::Height ? s.width == first.width
                                                  : s.height == first.height;
    if (s.channels != first.channels || !off_axis_ok) {
      throw ShapeError("concat_axis block " + to_string(s) +
                       " incompatible with " + to_string(first) + " along " +
                       to_string(axis));
    }
    total += s.extent(axis);
  }
  if (axis == Axis::Height) {
    out_shape.height = total;
  } else {
    out_shape.width = total;
  }
  ImageTensor out(out_shape);
  int offset = 0;
  for (const auto& block : blocks) {
    for (int c = 0; c < block.channels(); ++c) {
      for (int y = 0; y < block.height(); ++y) {
        const int oy = axis == Axis::Height ? y + offset : y;
        const int ox = axis == Axis::Width ? offset : 0;
        const auto row = block.plane(c).subspan(static_cast<std::size_t>(y) * block.width(), block.width());
        std::copy(row.begin(), row.end(), &out.at(c, oy, ox));
      }
    }
    offset += block.extent(axis);
  }
  return out;
}

ImageTensor resize_axis_bilinear(const ImageTensor& img, int new_len, Axis axis) {
  if (new_len < 1) {
    throw ArgumentError("resize_axis_bilinear: new length must be >= 1, got " +
                        std::to_string(new_len));
  }
  if (img.extent(axis) < 1) {
    throw ArgumentError("resize_axis_bilinear: empty source along " +
                        to_string(axis));
  }
  return apply_axis_map(img, AxisMap::bilinear(img.extent(axis), new_len), axis);
}

ImageTensor clamp01(const ImageTensor& img) {
  ImageTensor out = img;
  for (float& v : out.data()) {
    v = std::clamp(v, 0.0f, 1.0f);
  }
  return out;
}

float min_value(const ImageTensor& img) {
  if (img.empty()) throw ArgumentError("min_value of empty image");
  return *std::min_element(img.data().begin(), img.data().end());
}

float max_value(const ImageTensor& img) {
  if (img.empty()) throw ArgumentError("max_value of empty image");
  return *std::max_element(img.data().begin(), img.data().end());
}

float linf_norm(const ImageTensor& img) {
  float m = 0.0f;
  for (float v : img.data()) m = std::max(m, std::abs(v));
  return m;
}

double l1_norm(const ImageTensor& img) {
  double s = 0.0;
  for (float v : img.data()) s += std::abs(static_cast<double>(v));
  return s;
}

namespace {

template <class Op>
ImageTensor elementwise(const ImageTensor& a, const ImageTensor& b, Op op) {
  if (a.shape() != b.shape()) {
    throw ShapeError("elementwise shape mismatch " + to_string(a.shape()) +
                     " vs " + to_string(b.shape()));
  }
  ImageTensor out(a.shape());
  auto da = a.data();
  auto db = b.data();
  auto dout = out.data();
  for (std::size_t i = 0; i < dout.size(); ++i) dout[i] = op(da[i], db[i]);
  return out;
}

}  // namespace

ImageTensor operator+(const ImageTensor& a, const ImageTensor& b) {
  return elementwise(a, b, [](float x, float y) { return x + y; });
}

ImageTensor operator-(const ImageTensor& a, const ImageTensor& b) {
  return elementwise(a, b, [](float x, float y) { return x - y; });
}

}  // namespace bss
