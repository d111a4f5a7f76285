// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "bss/tiny_conv_net.hpp"

namespace bss {

// Layout (all integers little-endian):
//   bytes 0-7   magic "BSSCKPT\0"
//   u32         format version (1)
//   u32 x 6     in_channels, height, width, conv1, conv2, num_classes
//   u64         parameter count
//   f32 x count parameters
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const TinyConvNet& model, const std::filesystem::path& path);
TinyConvNet load_checkpoint(const std::filesystem::path& path);

}  // namespace bss
