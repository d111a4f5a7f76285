// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bss/image.hpp"
#include "bss/rng.hpp"

namespace bss::testing {

/// Value at (c, y, x) is c * 1000 + y * 100 + x, so every element is distinct.
inline ImageTensor index_image(int c, int h, int w) {
  ImageTensor img(c, h, w);
  for (int k = 0; k < c; ++k)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.at(k, y, x) = static_cast<float>(k * 1000 + y * 100 + x);
  return img;
}

inline ImageTensor random_image(const Shape& shape, std::uint64_t seed, float lo = 0.0f,
                                float hi = 1.0f) {
  Rng rng(seed);
  ImageTensor img(shape);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

inline double dot(const ImageTensor& a, const ImageTensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a.data()[i]) * b.data()[i];
  return s;
}

inline float ulp(float v) {
  return std::nextafter(std::abs(v), std::numeric_limits<float>::infinity()) - std::abs(v);
}

}  // namespace bss::testing

#include <filesystem>
#include <string>

namespace bss::testing {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("bss_test_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace bss::testing
