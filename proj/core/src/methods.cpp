// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/methods.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bss/error.hpp"

namespace bss {

std::string method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::None: return "mi-fgsm";
    case MethodKind::Bss: return "bss";
    case MethodKind::Bss1D: return "1d-bss";
    case MethodKind::BssRandomPoints: return "2d-bss-rp";
    case MethodKind::Bss1DRandomPoints: return "1d-bss-rp";
    case MethodKind::ScaleEnsemble: return "scale-ensemble";
    case MethodKind::ResizePad: return "resize-pad";
    case MethodKind::BlockShuffleRotate: return "block-shuffle-rotate";
  }
  return "unknown";
}

MethodKind parse_method_kind(const std::string& raw) {
  std::string name = raw;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "mi-fgsm" || name == "mifgsm" || name == "none" || name == "baseline")
    return MethodKind::None;
  if (name == "bss" || name == "2d-bss") return MethodKind::Bss;
  if (name == "1d-bss" || name == "bss-1d") return MethodKind::Bss1D;
  if (name == "2d-bss-rp" || name == "bss-rp") return MethodKind::BssRandomPoints;
  if (name == "1d-bss-rp" || name == "bss-1d-rp") return MethodKind::Bss1DRandomPoints;
  if (name == "scale-ensemble" || name == "sim") return MethodKind::ScaleEnsemble;
  if (name == "resize-pad" || name == "dim") return MethodKind::ResizePad;
  if (name == "block-shuffle-rotate" || name == "bsr") return MethodKind::BlockShuffleRotate;
  throw ConfigError("unknown method '" + raw + "'");
}

bool expands_number_scale(MethodKind kind) { return kind != MethodKind::None; }

std::vector<ImageTensor> TransformMethod::apply(const ImageTensor& img, const Rng& stream) const {
  std::vector<ImageTensor> out;
  out.reserve(number_scale());
  for (int k = 0; k < number_scale(); ++k) {
    Rng rng = stream.child(static_cast<std::uint64_t>(k));
    out.push_back(sample(img.shape(), k, rng)->forward(img));
  }
  return out;
}

BssConfig bss_config_for(MethodKind kind, const MethodParams& params, int n) {
  BssConfig cfg;
  cfg.seg = params.seg;
  cfg.r = params.r;
  cfg.num_transforms = n;
  cfg.target_mode = params.target_mode;
  switch (kind) {
    case MethodKind::Bss:
      cfg.seg.constrained = true;
      cfg.axes = AxesMode::TwoAxis;
      break;
    case MethodKind::Bss1D:
      cfg.seg.constrained = true;
      cfg.axes = AxesMode::OneAxis;
      break;
    case MethodKind::BssRandomPoints:
      cfg.seg.constrained = false;
      cfg.axes = AxesMode::TwoAxis;
      break;
    case MethodKind::Bss1DRandomPoints:
      cfg.seg.constrained = false;
      cfg.axes = AxesMode::OneAxis;
      break;
    default:
      throw ArgumentError(method_name(kind) + " is not a BSS variant");
  }
  return cfg;
}

namespace {

class NoTransform final : public TransformMethod {
 public:
  MethodKind kind() const override { return MethodKind::None; }
  int number_scale() const override { return 1; }
  void validate(const Shape&) const override {}
  std::unique_ptr<Warp> sample(const Shape&, int, Rng&) const override {
    return std::make_unique<IdentityWarp>();
  }
};

class BssMethod final : public TransformMethod {
 public:
  BssMethod(MethodKind kind, BssConfig cfg) : kind_(kind), cfg_(std::move(cfg)) {}
  MethodKind kind() const override { return kind_; }
  int number_scale() const override { return cfg_.num_transforms; }
  void validate(const Shape& shape) const override {
    if (!(cfg_.r >= 0.0 && cfg_.r <= 2.0)) {
      throw ConfigError("BSS ratio r must lie in [0, 2], got " + std::to_string(cfg_.r));
    }
    check_feasible(cfg_.seg, shape.width, shape.height);
  }
  std::unique_ptr<Warp> sample(const Shape& shape, int, Rng& rng) const override {
    return std::make_unique<SeparableWarp>(sample_bss_warp(shape, cfg_, rng));
  }

 private:
  MethodKind kind_;
  BssConfig cfg_;
};

class ScaleEnsembleMethod final : public TransformMethod {
 public:
  ScaleEnsembleMethod(int depth, int n) : depth_(depth), n_(n) {}
  MethodKind kind() const override { return MethodKind::ScaleEnsemble; }
  int number_scale() const override { return n_; }
  void validate(const Shape&) const override {
    if (depth_ < 1) throw ConfigError("scale ensemble depth must be >= 1");
  }
  std::unique_ptr<Warp> sample(const Shape&, int k, Rng&) const override {
    return std::make_unique<ScaleWarp>(std::ldexp(1.0f, -(k % depth_)));
  }

 private:
  int depth_;
  int n_;
};

// Axis map of length `len` that places a `len -> inner` resize at `offset`
// and zeros elsewhere.
AxisMap shrink_and_pad(int len, int inner, int offset) {
  std::vector<AxisTap> taps(len);
  const AxisMap resize = AxisMap::bilinear(len, inner);
  for (int i = 0; i < inner; ++i) taps[offset + i] = resize.taps()[i];
  return AxisMap(len, std::move(taps));
}

class ResizePadMethod final : public TransformMethod {
 public:
  ResizePadMethod(double min_scale, int n) : min_scale_(min_scale), n_(n) {}
  MethodKind kind() const override { return MethodKind::ResizePad; }
  int number_scale() const override { return n_; }
  void validate(const Shape&) const override {
    if (!(min_scale_ > 0.0 && min_scale_ <= 1.0)) {
      throw ConfigError("resize-pad minimum scale must lie in (0, 1]");
    }
  }
  std::unique_ptr<Warp> sample(const Shape& shape, int, Rng& rng) const override {
    const double s = rng.uniform(min_scale_, 1.0);
    const int nh = std::max(1, static_cast<int>(std::lround(s * shape.height)));
    const int nw = std::max(1, static_cast<int>(std::lround(s * shape.width)));
    const int top = static_cast<int>(rng.uniform_int(0, shape.height - nh));
    const int left = static_cast<int>(rng.uniform_int(0, shape.width - nw));
    auto warp = std::make_unique<SeparableWarp>();
    warp->add_step(Axis::Height, shrink_and_pad(shape.height, nh, top));
    warp->add_step(Axis::Width, shrink_and_pad(shape.width, nw, left));
    return warp;
  }

 private:
  double min_scale_;
  int n_;
};

std::vector<int> even_boundaries(int len, int parts) {
  std::vector<int> b(parts + 1);
  for (int j = 0; j <= parts; ++j) {
    b[j] = static_cast<int>((static_cast<long long>(j) * len) / parts);
  }
  return b;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n; i > 1; --i) {
    std::swap(p[i - 1], p[static_cast<int>(rng.uniform_int(0, i - 1))]);
  }
  return p;
}

class BlockShuffleRotateMethod final : public TransformMethod {
 public:
  BlockShuffleRotateMethod(int grid, double max_degrees, int n)
      : grid_(grid), max_degrees_(max_degrees), n_(n) {}
  MethodKind kind() const override { return MethodKind::BlockShuffleRotate; }
  int number_scale() const override { return n_; }
  void validate(const Shape& shape) const override {
    if (grid_ < 1 || grid_ > shape.height || grid_ > shape.width) {
      throw ConfigError("block-shuffle-rotate grid " + std::to_string(grid_) +
                        " does not fit image " + to_string(shape));
    }
    if (max_degrees_ < 0.0) throw ConfigError("rotation bound must be >= 0");
  }

  std::unique_ptr<Warp> sample(const Shape& shape, int, Rng& rng) const override {
    const auto by = even_boundaries(shape.height, grid_);
    const auto bx = even_boundaries(shape.width, grid_);
    const auto perm_y = random_permutation(grid_, rng);
    const auto perm_x = random_permutation(grid_, rng);
    std::vector<PixelWarp::Tap> taps(static_cast<std::size_t>(shape.height) * shape.width);

    int out_y = 0;
    for (int j = 0; j < grid_; ++j) {
      const int src_y0 = by[perm_y[j]];
      const int bh = by[perm_y[j] + 1] - src_y0;
      int out_x = 0;
      for (int i = 0; i < grid_; ++i) {
        const int src_x0 = bx[perm_x[i]];
        const int bw = bx[perm_x[i] + 1] - src_x0;
        const double theta = rng.uniform(-max_degrees_, max_degrees_) * std::numbers::pi / 180.0;
        const double c = std::cos(theta), s = std::sin(theta);
        const double cy = (bh - 1) / 2.0, cx = (bw - 1) / 2.0;
        for (int ly = 0; ly < bh; ++ly) {
          for (int lx = 0; lx < bw; ++lx) {
            // Inverse rotation: where in the source block does this pixel come from.
            const double dy = ly - cy, dx = lx - cx;
            const double sy = c * dy + s * dx + cy;
            const double sx = -s * dy + c * dx + cx;
            auto& tap = taps[static_cast<std::size_t>(out_y + ly) * shape.width + out_x + lx];
            if (sy < 0.0 || sx < 0.0 || sy > bh - 1 || sx > bw - 1) continue;
            const int y0 = static_cast<int>(std::floor(sy));
            const int x0 = static_cast<int>(std::floor(sx));
            const int y1 = std::min(y0 + 1, bh - 1);
            const int x1 = std::min(x0 + 1, bw - 1);
            tap.y0 = src_y0 + y0;
            tap.y1 = src_y0 + y1;
            tap.x0 = src_x0 + x0;
            tap.x1 = src_x0 + x1;
            tap.fy = y1 == y0 ? 0.0f : static_cast<float>(sy - y0);
            tap.fx = x1 == x0 ? 0.0f : static_cast<float>(sx - x0);
          }
        }
        out_x += bw;
      }
      out_y += bh;
    }
    return std::make_unique<PixelWarp>(shape.height, shape.width, std::move(taps));
  }

 private:
  int grid_;
  double max_degrees_;
  int n_;
};

}  // namespace

std::unique_ptr<TransformMethod> make_method(MethodKind kind, const MethodParams& params, int n) {
  if (kind != MethodKind::None && n < 1) {
    throw ConfigError("number scale must be >= 1 for " + method_name(kind));
  }
  switch (kind) {
    case MethodKind::None:
      return std::make_unique<NoTransform>();
    case MethodKind::Bss:
    case MethodKind::Bss1D:
    case MethodKind::BssRandomPoints:
    case MethodKind::Bss1DRandomPoints:
      return std::make_unique<BssMethod>(kind, bss_config_for(kind, params, n));
    case MethodKind::ScaleEnsemble:
      return std::make_unique<ScaleEnsembleMethod>(params.scale_depth, n);
    case MethodKind::ResizePad:
      return std::make_unique<ResizePadMethod>(params.resize_min_scale, n);
    case MethodKind::BlockShuffleRotate:
      return std::make_unique<BlockShuffleRotateMethod>(params.shuffle_grid,
                                                        params.rotate_max_degrees, n);
  }
  throw ArgumentError("unhandled method kind");
}

}  // namespace bss
