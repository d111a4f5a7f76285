// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "bss/axis_map.hpp"
#include "bss/bss_transform.hpp"
#include "bss/error.hpp"
#include "bss/rng.hpp"
#include "byte_order.hpp"

namespace bss {

namespace {

// Texture classes. Axis-wise stretching changes the scale of a pattern but
// not its kind, so labels survive the warps the attacks apply.
enum TextureClass {
  kHorizontalStripes,
  kVerticalStripes,
  kDiagonalDown,
  kDiagonalUp,
  kChecker,
  kGridLines,
  kBlob,
  kRings,
  kSpokes,
  kFlat,
};

struct Texture {
  int cls;
  double freq;        // radians per pixel
  double cx, cy;      // phase origin
  double sharpness;

  // Pattern value in [-1, 1].
  double value(double x, double y) const {
    const double u = x - cx, v = y - cy;
    auto wave = [&](double t) { return std::tanh(sharpness * std::sin(freq * t)); };
    auto line = [&](double t) { return std::cos(freq * t) > 0.6 ? 1.0 : -1.0; };
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    switch (cls) {
      case kHorizontalStripes: return wave(v);
      case kVerticalStripes: return wave(u);
      case kDiagonalDown: return wave((u - v) * inv_sqrt2);
      case kDiagonalUp: return wave((u + v) * inv_sqrt2);
      case kChecker: return std::tanh(sharpness * std::sin(freq * u) * std::sin(freq * v) * 2.0);
      case kGridLines: return std::max(line(u), line(v));
      case kBlob: return std::tanh(sharpness * (7.5 - freq * std::hypot(u, v)));
      case kRings: return wave(std::hypot(u, v));
      case kSpokes: return std::tanh(sharpness * std::sin(std::round(freq * 8.0) * std::atan2(v, u)));
      case kFlat: return 0.0;
      default: return 0.0;
    }
  }
};

}  // namespace

LabeledImage render_synthetic(std::uint64_t seed, int index, int size) {
  if (size < 8) throw ArgumentError("synthetic images need size >= 8");
  Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(index)});
  const int label = index % kSyntheticClasses;
  const double s = size;

  double base[3], tint[3];
  const double contrast = rng.uniform(0.16, 0.4);
  for (int c = 0; c < 3; ++c) {
    base[c] = rng.uniform(0.3, 0.7);
    tint[c] = contrast * rng.uniform(0.6, 1.0) * (rng.coin() ? 1.0 : -1.0);
  }
  const double period = rng.uniform(8.0, 12.0) * s / 32.0;
  const Texture tex{label, 2.0 * std::numbers::pi / period, rng.uniform(0.3, 0.7) * s,
                    rng.uniform(0.3, 0.7) * s, rng.uniform(1.5, 4.0)};
  constexpr int kSuper = 2;

  ImageTensor img(3, size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double pattern = 0.0;
      for (int sy = 0; sy < kSuper; ++sy) {
        for (int sx = 0; sx < kSuper; ++sx) {
          pattern += tex.value(x + (sx + 0.5) / kSuper, y + (sy + 0.5) / kSuper);
        }
      }
      pattern /= kSuper * kSuper;
      for (int c = 0; c < 3; ++c) {
        const double v = base[c] + 0.5 * pattern * tint[c] + rng.uniform(-0.03, 0.03);
        img.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return {std::move(img), label};
}

namespace {

AxisMap crop_map(int len, int crop, int offset) {
  std::vector<AxisTap> taps = AxisMap::bilinear(crop, len).taps();
  for (auto& t : taps) {
    t.lo += offset;
    t.hi += offset;
  }
  return AxisMap(len, std::move(taps));
}

}  // namespace

ImageTensor random_resized_crop(const ImageTensor& img, double min_area, double max_aspect,
                                Rng& rng) {
  if (!(min_area > 0.0 && min_area <= 1.0) || !(max_aspect >= 1.0)) {
    throw ArgumentError("random_resized_crop: need 0 < min_area <= 1 and max_aspect >= 1");
  }
  const int h = img.height();
  const int w = img.width();
  const double log_aspect = std::log(max_aspect);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double area = rng.uniform(min_area, 1.0) * h * w;
    const double aspect = std::exp(rng.uniform(-log_aspect, log_aspect));
    const int cw = static_cast<int>(std::lround(std::sqrt(area * aspect)));
    const int ch = static_cast<int>(std::lround(std::sqrt(area / aspect)));
    if (cw < 1 || ch < 1 || cw > w || ch > h) continue;
    const int top = static_cast<int>(rng.uniform_int(0, h - ch));
    const int left = static_cast<int>(rng.uniform_int(0, w - cw));
    return apply_axis_map(apply_axis_map(img, crop_map(h, ch, top), Axis::Height),
                          crop_map(w, cw, left), Axis::Width);
  }
  return img;
}

ImageTensor piecewise_stretch(const ImageTensor& img, int pieces, double limit, Rng& rng) {
  if (pieces < 1 || !(limit >= 0.0 && limit < 1.0)) {
    throw ArgumentError("piecewise_stretch: need pieces >= 1 and 0 <= limit < 1");
  }
  ImageTensor out = img;
  for (Axis axis : {Axis::Height, Axis::Width}) {
    const int len = out.extent(axis);
    if (pieces > len) throw ArgumentError("piecewise_stretch: more pieces than pixels");
    std::vector<int> bounds{0, len};
    while (static_cast<int>(bounds.size()) < pieces + 1) {
      const int cut = static_cast<int>(rng.uniform_int(1, len - 1));
      if (std::find(bounds.begin(), bounds.end(), cut) == bounds.end()) bounds.push_back(cut);
    }
    std::sort(bounds.begin(), bounds.end());
    const SegmentationPlan plan(axis, len, bounds);
    std::vector<double> shares(pieces);
    for (auto& v : shares) v = 1.0 + rng.uniform(-limit, limit);
    const auto weights = normalize_weights(shares);
    std::vector<int> targets(pieces);
    for (int i = 0; i < pieces; ++i) targets[i] = static_cast<int>(std::lround(weights[i] * len));
    out = apply_axis_map(out, stretch_axis_map(plan, adjust_lengths(targets, len)), axis);
  }
  return out;
}

std::vector<LabeledImage> make_synthetic(const SyntheticSpec& spec) {
  if (spec.count < 0) throw ArgumentError("synthetic count must be >= 0");
  std::vector<LabeledImage> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) out.push_back(render_synthetic(spec.seed, i, spec.size));
  return out;
}

std::vector<LabeledImage> load_idx(const std::filesystem::path& images,
                                   const std::filesystem::path& labels) {
  std::ifstream img_in(images, std::ios::binary);
  if (!img_in) throw IoError("cannot open IDX images " + images.string());
  std::ifstream lbl_in(labels, std::ios::binary);
  if (!lbl_in) throw IoError("cannot open IDX labels " + labels.string());

  detail::ByteReader ir(img_in, "IDX images " + images.string());
  const std::uint32_t img_magic = ir.u32_be();
  if (img_magic != 0x00000803u) {
    ir.fail("bad magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08x", img_magic);
      return std::string(buf);
    }() + " (expected 0x00000803)", 0);
  }
  const std::uint32_t n = ir.u32_be();
  const std::uint32_t rows = ir.u32_be();
  const std::uint32_t cols = ir.u32_be();
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) ir.fail("implausible image size", 8);

  detail::ByteReader lr(lbl_in, "IDX labels " + labels.string());
  const std::uint32_t lbl_magic = lr.u32_be();
  if (lbl_magic != 0x00000801u) {
    lr.fail("bad magic (expected 0x00000801)", 0);
  }
  const std::uint32_t n_labels = lr.u32_be();
  if (n_labels != n) {
    lr.fail("label count " + std::to_string(n_labels) + " does not match image count " +
                std::to_string(n),
            4);
  }

  std::vector<LabeledImage> out;
  out.reserve(n);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(rows) * cols);
  for (std::uint32_t i = 0; i < n; ++i) {
    ir.read(pixels.data(), pixels.size());
    std::uint8_t label = 0;
    lr.read(&label, 1);
    ImageTensor img(1, static_cast<int>(rows), static_cast<int>(cols));
    std::transform(pixels.begin(), pixels.end(), img.data().begin(),
                   [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
    out.push_back({std::move(img), label});
  }
  return out;
}

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

long long parse_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("dataset spec: bad " + what + " '" + s + "'");
  }
}

}  // namespace

std::vector<LabeledImage> load_dataset(const std::string& source) {
  if (source.rfind("synthetic:", 0) == 0) {
    const auto parts = split_on(source, ':');
    if (parts.size() != 3 && parts.size() != 4) {
      throw ConfigError("dataset spec must be synthetic:<seed>:<count>[:<size>], got '" + source +
                        "'");
    }
    SyntheticSpec spec;
    spec.seed = static_cast<std::uint64_t>(parse_integer(parts[1], "seed"));
    spec.count = static_cast<int>(parse_integer(parts[2], "count"));
    if (parts.size() == 4) spec.size = static_cast<int>(parse_integer(parts[3], "size"));
    if (spec.count < 1) throw ConfigError("synthetic dataset count must be >= 1");
    return make_synthetic(spec);
  }
  const auto parts = split_on(source, ',');
  if (parts.size() != 2) {
    throw ConfigError("dataset spec must be synthetic:<seed>:<count>[:<size>] or "
                      "<images.idx>,<labels.idx>, got '" + source + "'");
  }
  return load_idx(parts[0], parts[1]);
}

}  // namespace bss
