// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bss/classifier.hpp"
#include "bss/rng.hpp"

namespace bss {

inline constexpr int kSyntheticClasses = 10;

struct SyntheticSpec {
  std::uint64_t seed = 0;
  int count = 0;
  int size = 32;  // square resolution
};

/// Procedurally rendered 3-channel textures in ten classes (stripes in four
/// orientations, checker, grid lines, blob, rings, spokes, flat)
/// with random period, phase, low-contrast tint and pixel noise. The label of
/// image i is i % 10 and the image depends only on (seed, i).
std::vector<LabeledImage> make_synthetic(const SyntheticSpec& spec);
LabeledImage render_synthetic(std::uint64_t seed, int index, int size);

/// Crops a region covering U(min_area, 1) of the image with aspect ratio
/// log-uniform in [1/max_aspect, max_aspect] and resizes it back to full size
/// (bilinear). Falls back to the identity after 10 rejected draws.
ImageTensor random_resized_crop(const ImageTensor& img, double min_area, double max_aspect,
                                Rng& rng);

/// Cuts each axis at `pieces - 1` random points and resizes piece i to a
/// share of the extent proportional to 1 + U(-limit, limit).
ImageTensor piecewise_stretch(const ImageTensor& img, int pieces, double limit, Rng& rng);

/// Parses IDX image (magic 0x00000803, u8, n x rows x cols) and label
/// (magic 0x00000801, u8, n) files. Pixels scale to [0, 1]; images are 1 x rows x cols.
std::vector<LabeledImage> load_idx(const std::filesystem::path& images,
                                   const std::filesystem::path& labels);

/// Accepts `synthetic:<seed>:<count>[:<size>]` or `<images.idx>,<labels.idx>`.
std::vector<LabeledImage> load_dataset(const std::string& source);

}  // namespace bss
