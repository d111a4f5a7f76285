// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bss/bss_transform.hpp"
#include "bss/image.hpp"
#include "bss/rng.hpp"
#include "bss/warp.hpp"

namespace bss {

enum class MethodKind {
  None,                // plain MI-FGSM, N = 1
  Bss,                 // constrained points, both axes
  Bss1D,               // constrained points, one axis
  BssRandomPoints,     // unconstrained points, both axes
  Bss1DRandomPoints,   // unconstrained points, one axis
  ScaleEnsemble,       // x / 2^i
  ResizePad,           // random shrink then zero pad
  BlockShuffleRotate,  // grid shuffle plus per-block rotation
};

/// Canonical names: mi-fgsm, bss, 1d-bss, 2d-bss-rp, 1d-bss-rp,
/// scale-ensemble, resize-pad, block-shuffle-rotate.
std::string method_name(MethodKind kind);
/// Accepts the canonical names plus a few aliases (none, baseline, sim, dim, bsr, ...).
MethodKind parse_method_kind(const std::string& name);
bool expands_number_scale(MethodKind kind);

/// Parameters shared by every method built for one experiment.
struct MethodParams {
  SegmentationConfig seg;  // the constrained flag is set per method
  double r = 1.0;
  TargetLengthMode target_mode = TargetLengthMode::TotalShare;
  int scale_depth = 5;
  double resize_min_scale = 0.85;
  int shuffle_grid = 2;
  double rotate_max_degrees = 24.0;
};

/// A randomized input transformation that yields `number_scale()` variants
/// of its input per attack iteration.
class TransformMethod {
 public:
  virtual ~TransformMethod() = default;

  virtual MethodKind kind() const = 0;
  std::string name() const { return method_name(kind()); }
  virtual int number_scale() const = 0;

  /// Throws ConfigError if the method cannot run on images of `shape`.
  virtual void validate(const Shape& shape) const = 0;

  /// Samples transform k of an iteration from its own substream.
  virtual std::unique_ptr<Warp> sample(const Shape& shape, int k, Rng& rng) const = 0;

  /// All N variants; variant k consumes stream.child(k).
  std::vector<ImageTensor> apply(const ImageTensor& img, const Rng& stream) const;
};

/// Builds a method at number scale `n`. MethodKind::None ignores `n` and
/// always reports N = 1.
std::unique_ptr<TransformMethod> make_method(MethodKind kind, const MethodParams& params, int n);

/// BssConfig corresponding to one of the four BSS variants.
BssConfig bss_config_for(MethodKind kind, const MethodParams& params, int n);

}  // namespace bss
