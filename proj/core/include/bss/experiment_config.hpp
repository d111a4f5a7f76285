// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bss/attack.hpp"
#include "bss/bss_transform.hpp"
#include "bss/methods.hpp"
#include "bss/tiny_conv_net.hpp"

namespace bss {

struct MethodEntry {
  MethodKind kind = MethodKind::None;
  std::optional<int> fixed_n;  // "name@N"; needs allow_mixed_n

  bool operator==(const MethodEntry&) const = default;
};

struct TrainSection {
  std::string dataset = "synthetic:1001:4000:32";
  std::string heldout = "synthetic:1002:1000:32";
  ConvNetArch arch;
  ConvNetArch target_arch;  // same as arch unless target_conv1/2 are set
  TrainOptions options;
  std::uint64_t surrogate_seed = 11;
  std::vector<std::uint64_t> target_seeds{22, 33};
};

/// Everything one experiment needs. Paths are resolved against the directory
/// of the config file they were read from.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string dataset = "synthetic:2024:200:32";
  int samples = 0;  // 0 keeps the whole dataset
  std::filesystem::path surrogate;
  std::vector<std::filesystem::path> targets;
  std::vector<MethodEntry> methods{{MethodKind::None, {}}, {MethodKind::Bss, {}}};
  std::vector<int> number_scales{10};
  std::filesystem::path out_dir = "results";
  int threads = 1;
  bool allow_mixed_n = false;
  bool record_wall_time = false;

  AttackConfig attack;

  // BSS distances are given at base_resolution and scaled to the dataset.
  int bss_pairs = 2;
  int bss_border_margin = 35;
  int bss_min_spacing = 40;
  double bss_ratio = 1.0;
  int base_resolution = 224;
  TargetLengthMode target_mode = TargetLengthMode::TotalShare;

  int scale_depth = 5;
  double resize_min_scale = 0.85;
  int shuffle_grid = 2;
  double rotate_max_degrees = 24.0;

  TrainSection train;
};

/// Parses the INI-style text format (see configs/). Unknown keys are errors.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Accepts plain decimals and fractions such as "16/255".
double parse_real(const std::string& text);

}  // namespace bss
