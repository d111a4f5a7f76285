// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>

#include "bss/image.hpp"

namespace bss {

/// Byte v maps to v / 255; the inverse rounds half up and saturates.
float byte_to_unit(std::uint8_t v);
std::uint8_t unit_to_byte(float v);

// 8-bit PNG, gray (1 channel) or RGB (3 channels). Alpha is dropped on read.
ImageTensor read_png(const std::filesystem::path& path);
void write_png(const ImageTensor& img, const std::filesystem::path& path);

// Binary PPM (P6, maxval 255). Writes require 3 channels; a 1-channel image
// is replicated to gray RGB.
ImageTensor read_ppm(const std::filesystem::path& path);
void write_ppm(const ImageTensor& img, const std::filesystem::path& path);

/// Dispatches on extension (.png, .ppm).
ImageTensor read_image(const std::filesystem::path& path);
void write_image(const ImageTensor& img, const std::filesystem::path& path);

/// Raw perturbation dump: "BSSD", u32 channels/height/width, then
/// little-endian float32 values. Round-trips bit-exactly.
void write_raw_f32(const ImageTensor& img, const std::filesystem::path& path);
ImageTensor read_raw_f32(const std::filesystem::path& path);

}  // namespace bss
