// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/tiny_conv_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Core>

#include "bss/dataset.hpp"
#include "bss/error.hpp"

namespace bss {

void ConvNetArch::validate() const {
  if (in_channels < 1 || conv1_channels < 1 || conv2_channels < 1 || num_classes < 1) {
    throw ArgumentError("convnet channel and class counts must be positive");
  }
  if (height < 4 || width < 4 || height % 4 != 0 || width % 4 != 0) {
    throw ArgumentError("convnet input extents must be positive multiples of 4, got " +
                        std::to_string(height) + "x" + std::to_string(width));
  }
}

std::size_t ConvNetArch::param_count() const {
  const std::size_t c0 = in_channels, c1 = conv1_channels, c2 = conv2_channels;
  const std::size_t feat = c2 * (height / 4) * (width / 4);
  return c1 * c0 * 9 + c1 + c2 * c1 * 9 + c2 + num_classes * feat + num_classes;
}

namespace {

struct Layout {
  int c0, c1, c2, classes;
  int h, w, h2, w2, h4, w4;
  std::size_t w1, b1, w2o, b2, wfc, bfc, feat;

  explicit Layout(const ConvNetArch& a)
      : c0(a.in_channels), c1(a.conv1_channels), c2(a.conv2_channels), classes(a.num_classes),
        h(a.height), w(a.width), h2(a.height / 2), w2(a.width / 2), h4(a.height / 4),
        w4(a.width / 4) {
    w1 = 0;
    b1 = w1 + static_cast<std::size_t>(c1) * c0 * 9;
    w2o = b1 + c1;
    b2 = w2o + static_cast<std::size_t>(c2) * c1 * 9;
    wfc = b2 + c2;
    feat = static_cast<std::size_t>(c2) * h4 * w4;
    bfc = wfc + classes * feat;
  }
};

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <class T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

// Rows are (input channel, ky, kx) taps, columns are output pixels; zero
// padding of one pixel.
template <class T>
void im2col(const T* in, int cin, int h, int w, T* cols) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int ic = 0; ic < cin; ++ic) {
    const T* src = in + ic * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = cols + ((ic * 3 + ky) * 3 + kx) * plane;
        const int dy = ky - 1, dx = kx - 1;
        for (int y = 0; y < h; ++y) {
          T* out = row + static_cast<std::size_t>(y) * w;
          const int sy = y + dy;
          if (sy < 0 || sy >= h) {
            std::fill(out, out + w, T(0));
            continue;
          }
          const T* srow = src + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + dx;
            out[x] = sx >= 0 && sx < w ? srow[sx] : T(0);
          }
        }
      }
    }
  }
}

template <class T>
void col2im_add(const T* cols, int cin, int h, int w, T* out) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::fill(out, out + cin * plane, T(0));
  for (int ic = 0; ic < cin; ++ic) {
    T* dst = out + ic * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = cols + ((ic * 3 + ky) * 3 + kx) * plane;
        const int dy = ky - 1, dx = kx - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
        for (int y = y0; y < y1; ++y) {
          const T* g = row + static_cast<std::size_t>(y) * w;
          T* d = dst + static_cast<std::size_t>(y + dy) * w + dx;
          for (int x = x0; x < x1; ++x) d[x] += g[x];
        }
      }
    }
  }
}

template <class T>
void conv3x3_forward(const T* cols, int cin, int h, int w, const T* weight, const T* bias,
                     int cout, T* out) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  MatrixMap<T> o(out, cout, hw);
  o.noalias() = ConstMatrixMap<T>(weight, cout, cin * 9) * ConstMatrixMap<T>(cols, cin * 9, hw);
  for (int oc = 0; oc < cout; ++oc) o.row(oc).array() += bias[oc];
}

// Gradient with respect to the conv input.
template <class T>
void conv3x3_backward_data(const T* dout, int cout, int h, int w, const T* weight, int cin,
                           T* din) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  RowMatrix<T> dcols = ConstMatrixMap<T>(weight, cout, cin * 9).transpose() *
                       ConstMatrixMap<T>(dout, cout, hw);
  col2im_add(dcols.data(), cin, h, w, din);
}

template <class T>
void conv3x3_backward_params(const T* cols, int cin, int h, int w, const T* dout, int cout,
                             double* dweight, double* dbias) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  const ConstMatrixMap<T> g(dout, cout, hw);
  const RowMatrix<T> dw = g * ConstMatrixMap<T>(cols, cin * 9, hw).transpose();
  for (Eigen::Index i = 0; i < dw.size(); ++i) dweight[i] += static_cast<double>(dw.data()[i]);
  for (int oc = 0; oc < cout; ++oc) {
    double bsum = 0.0;
    for (Eigen::Index i = 0; i < hw; ++i) bsum += g(oc, i);
    dbias[oc] += bsum;
  }
}

// ReLU followed by 2x2 average pooling.
template <class T>
void relu_pool(const T* pre, int c, int h, int w, T* out) {
  const int h2 = h / 2, w2 = w / 2;
  for (int ch = 0; ch < c; ++ch) {
    const T* p = pre + static_cast<std::size_t>(ch) * h * w;
    T* o = out + static_cast<std::size_t>(ch) * h2 * w2;
    for (int y = 0; y < h2; ++y) {
      const T* r0 = p + static_cast<std::size_t>(2 * y) * w;
      const T* r1 = r0 + w;
      for (int x = 0; x < w2; ++x) {
        const T a = std::max(r0[2 * x], T(0)), b = std::max(r0[2 * x + 1], T(0));
        const T cc = std::max(r1[2 * x], T(0)), d = std::max(r1[2 * x + 1], T(0));
        o[static_cast<std::size_t>(y) * w2 + x] = T(0.25) * ((a + b) + (cc + d));
      }
    }
  }
}

template <class T>
void relu_pool_backward(const T* pre, const T* dpooled, int c, int h, int w, T* dpre) {
  const int h2 = h / 2, w2 = w / 2;
  for (int ch = 0; ch < c; ++ch) {
    const T* p = pre + static_cast<std::size_t>(ch) * h * w;
    T* d = dpre + static_cast<std::size_t>(ch) * h * w;
    const T* g = dpooled + static_cast<std::size_t>(ch) * h2 * w2;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        d[i] = p[i] > T(0) ? T(0.25) * g[static_cast<std::size_t>(y / 2) * w2 + x / 2] : T(0);
      }
    }
  }
}

template <class T>
struct Pass {
  std::vector<T> cols1, a1, p1, cols2, a2, p2;
  std::vector<double> logits;
};

template <class T>
Pass<T> run_forward(const Layout& L, const T* params, const T* input) {
  Pass<T> s;
  s.a1.resize(static_cast<std::size_t>(L.c1) * L.h * L.w);
  s.p1.resize(static_cast<std::size_t>(L.c1) * L.h2 * L.w2);
  s.a2.resize(static_cast<std::size_t>(L.c2) * L.h2 * L.w2);
  s.p2.resize(L.feat);
  s.cols1.resize(static_cast<std::size_t>(L.c0) * 9 * L.h * L.w);
  s.cols2.resize(static_cast<std::size_t>(L.c1) * 9 * L.h2 * L.w2);
  im2col(input, L.c0, L.h, L.w, s.cols1.data());
  conv3x3_forward(s.cols1.data(), L.c0, L.h, L.w, params + L.w1, params + L.b1, L.c1,
                  s.a1.data());
  relu_pool(s.a1.data(), L.c1, L.h, L.w, s.p1.data());
  im2col(s.p1.data(), L.c1, L.h2, L.w2, s.cols2.data());
  conv3x3_forward(s.cols2.data(), L.c1, L.h2, L.w2, params + L.w2o, params + L.b2, L.c2,
                  s.a2.data());
  relu_pool(s.a2.data(), L.c2, L.h2, L.w2, s.p2.data());
  s.logits.resize(L.classes);
  for (int k = 0; k < L.classes; ++k) {
    const T* wk = params + L.wfc + k * L.feat;
    T z = params[L.bfc + k];
    for (std::size_t i = 0; i < L.feat; ++i) z += wk[i] * s.p2[i];
    s.logits[k] = static_cast<double>(z);
    if (!std::isfinite(s.logits[k])) throw NumericError("non-finite logit in TinyConvNet");
  }
  return s;
}

// Backpropagates dlogits. Fills `dinput` when non-null and accumulates the
// parameter gradient when `dparams` is non-null.
template <class T>
void run_backward(const Layout& L, const T* params, const Pass<T>& s,
                  std::span<const double> dlogits, T* dinput, double* dparams) {
  std::vector<T> dl(dlogits.begin(), dlogits.end());
  std::vector<T> dp2(L.feat, T(0));
  for (int k = 0; k < L.classes; ++k) {
    const T* wk = params + L.wfc + k * L.feat;
    for (std::size_t i = 0; i < L.feat; ++i) dp2[i] += wk[i] * dl[k];
  }
  if (dparams) {
    for (int k = 0; k < L.classes; ++k) {
      double* dwk = dparams + L.wfc + k * L.feat;
      for (std::size_t i = 0; i < L.feat; ++i) dwk[i] += dlogits[k] * s.p2[i];
      dparams[L.bfc + k] += dlogits[k];
    }
  }
  std::vector<T> da2(s.a2.size());
  relu_pool_backward(s.a2.data(), dp2.data(), L.c2, L.h2, L.w2, da2.data());
  if (dparams) {
    conv3x3_backward_params(s.cols2.data(), L.c1, L.h2, L.w2, da2.data(), L.c2, dparams + L.w2o,
                            dparams + L.b2);
  }
  std::vector<T> dp1(s.p1.size());
  conv3x3_backward_data(da2.data(), L.c2, L.h2, L.w2, params + L.w2o, L.c1, dp1.data());
  std::vector<T> da1(s.a1.size());
  relu_pool_backward(s.a1.data(), dp1.data(), L.c1, L.h, L.w, da1.data());
  if (dparams) {
    conv3x3_backward_params(s.cols1.data(), L.c0, L.h, L.w, da1.data(), L.c1, dparams + L.w1,
                            dparams + L.b1);
  }
  if (dinput) {
    conv3x3_backward_data(da1.data(), L.c1, L.h, L.w, params + L.w1, L.c0, dinput);
  }
}

float he_bound(int fan_in) { return static_cast<float>(std::sqrt(6.0 / fan_in)); }

}  // namespace

TinyConvNet::TinyConvNet(ConvNetArch arch) : arch_(arch) {
  arch_.validate();
  params_.assign(arch_.param_count(), 0.0f);
}

TinyConvNet::TinyConvNet(ConvNetArch arch, std::vector<float> params)
    : arch_(arch), params_(std::move(params)) {
  arch_.validate();
  if (params_.size() != arch_.param_count()) {
    throw ShapeError("TinyConvNet expects " + std::to_string(arch_.param_count()) +
                     " parameters, got " + std::to_string(params_.size()));
  }
}

TinyConvNet TinyConvNet::initialized(ConvNetArch arch, Rng& rng) {
  TinyConvNet net(arch);
  const Layout L(net.arch_);
  auto fill = [&](std::size_t begin, std::size_t end, float bound) {
    for (std::size_t i = begin; i < end; ++i) {
      net.params_[i] = static_cast<float>(rng.uniform(-bound, bound));
    }
  };
  fill(L.w1, L.b1, he_bound(L.c0 * 9));
  fill(L.w2o, L.b2, he_bound(L.c1 * 9));
  fill(L.wfc, L.bfc, he_bound(static_cast<int>(L.feat)));
  return net;
}

std::uint64_t TinyConvNet::checksum() const {
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(params_.data()),
                                  params_.size() * sizeof(float)));
}

std::vector<float> TinyConvNet::forward(const ImageTensor& img) const {
  check_input_shape(input_shape(), img);
  const Layout L(arch_);
  const auto s = run_forward<float>(L, params_.data(), img.data().data());
  return std::vector<float>(s.logits.begin(), s.logits.end());
}

LossAndGrad TinyConvNet::loss_and_input_grad(const ImageTensor& img, int label) const {
  check_input_shape(input_shape(), img);
  check_label(label, arch_.num_classes);
  const Layout L(arch_);
  const auto s = run_forward<float>(L, params_.data(), img.data().data());
  std::vector<double> dlogits(L.classes);
  LossAndGrad out;
  out.loss = softmax_cross_entropy(s.logits, label, dlogits);
  out.grad = ImageTensor(input_shape());
  run_backward<float>(L, params_.data(), s, dlogits, out.grad.data().data(),
                      nullptr);
  return out;
}

double TinyConvNet::accumulate_param_grad(const ImageTensor& img, int label,
                                          std::span<double> param_grad) const {
  check_input_shape(input_shape(), img);
  check_label(label, arch_.num_classes);
  if (param_grad.size() != params_.size()) throw ShapeError("parameter gradient size mismatch");
  const Layout L(arch_);
  const auto s = run_forward<float>(L, params_.data(), img.data().data());
  std::vector<double> dlogits(L.classes);
  const double loss = softmax_cross_entropy(s.logits, label, dlogits);
  run_backward<float>(L, params_.data(), s, dlogits, nullptr,
                      param_grad.data());
  return loss;
}

double TinyConvNet::batch_loss_and_param_grad(std::span<const LabeledImage> batch,
                                              std::span<double> param_grad) const {
  if (batch.empty()) throw ArgumentError("empty batch");
  std::fill(param_grad.begin(), param_grad.end(), 0.0);
  double loss = 0.0;
  for (const auto& ex : batch) loss += accumulate_param_grad(ex.image, ex.label, param_grad);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : param_grad) g *= inv;
  return loss * inv;
}

namespace {

void check_f64_input(const ConvNetArch& arch, std::size_t n) {
  if (n != arch.input_shape().size()) throw ShapeError("64-bit input has wrong length");
}

}  // namespace

double TinyConvNet::loss_f64(std::span<const double> input, int label) const {
  check_f64_input(arch_, input.size());
  check_label(label, arch_.num_classes);
  const Layout L(arch_);
  const std::vector<double> p(params_.begin(), params_.end());
  const auto s = run_forward<double>(L, p.data(), input.data());
  std::vector<double> dlogits(L.classes);
  return softmax_cross_entropy(s.logits, label, dlogits);
}

double TinyConvNet::loss_and_input_grad_f64(std::span<const double> input, int label,
                                            std::span<double> grad) const {
  check_f64_input(arch_, input.size());
  check_f64_input(arch_, grad.size());
  check_label(label, arch_.num_classes);
  const Layout L(arch_);
  const std::vector<double> p(params_.begin(), params_.end());
  const auto s = run_forward<double>(L, p.data(), input.data());
  std::vector<double> dlogits(L.classes);
  const double loss = softmax_cross_entropy(s.logits, label, dlogits);
  run_backward<double>(L, p.data(), s, dlogits, grad.data(), nullptr);
  return loss;
}

std::vector<std::uint8_t> TinyConvNet::relu_pattern_f64(std::span<const double> input) const {
  check_f64_input(arch_, input.size());
  const Layout L(arch_);
  const std::vector<double> p(params_.begin(), params_.end());
  const auto s = run_forward<double>(L, p.data(), input.data());
  std::vector<std::uint8_t> pattern;
  pattern.reserve(s.a1.size() + s.a2.size());
  for (double v : s.a1) pattern.push_back(v > 0.0);
  for (double v : s.a2) pattern.push_back(v > 0.0);
  return pattern;
}

double accuracy(const Classifier& model, std::span<const LabeledImage> data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : data) correct += model.predict(ex.image) == ex.label;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainReport train(TinyConvNet& model, std::span<const LabeledImage> data,
                  std::span<const LabeledImage> heldout, const TrainOptions& options, Rng& rng) {
  if (data.empty()) throw ArgumentError("train: empty dataset");
  if (options.epochs < 0 || options.batch_size < 1) {
    throw ArgumentError("train: epochs must be >= 0 and batch size >= 1");
  }
  auto params = model.params();
  std::vector<double> grad(params.size());
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> second;  // Adam's second-moment estimate
  if (options.optimizer == Optimizer::Adam) second.assign(params.size(), 0.0);
  int step = 0;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledImage> batch;
  TrainReport report;
  const bool crop = options.crop_min_area < 1.0 || options.crop_max_aspect > 1.0;
  const bool stretch = options.stretch_pieces > 0 && options.stretch_limit > 0.0;
  const std::size_t batches_per_epoch =
      (data.size() + static_cast<std::size_t>(options.batch_size) - 1) / options.batch_size;
  const double total_steps = static_cast<double>(batches_per_epoch) * options.epochs;
  std::size_t global_step = 0;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    // Fisher-Yates with our own integer draws for portable determinism.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(data[order[i]]);
        if (crop) {
          batch.back().image = random_resized_crop(batch.back().image, options.crop_min_area,
                                                   options.crop_max_aspect, rng);
        }
        if (stretch) {
          batch.back().image = piecewise_stretch(batch.back().image, options.stretch_pieces,
                                            options.stretch_limit, rng);
        }
      }
      double loss = 0.0;
      try {
        loss = model.batch_loss_and_param_grad(batch, grad);
      } catch (const NumericError&) {
        loss = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(loss)) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                            " (non-finite loss)");
      }
      double lr = options.learning_rate;
      if (options.cosine_decay) {
        lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(global_step) / total_steps));
      }
      ++global_step;
      if (options.optimizer == Optimizer::Adam) {
        constexpr double kBeta2 = 0.999, kEps = 1e-8;
        ++step;
        const double c1 = 1.0 - std::pow(options.momentum, step);
        const double c2 = 1.0 - std::pow(kBeta2, step);
        for (std::size_t i = 0; i < params.size(); ++i) {
          velocity[i] = options.momentum * velocity[i] + (1.0 - options.momentum) * grad[i];
          second[i] = kBeta2 * second[i] + (1.0 - kBeta2) * grad[i] * grad[i];
          const double update = (velocity[i] / c1) / (std::sqrt(second[i] / c2) + kEps);
          params[i] = static_cast<float>(params[i] - lr * update);
        }
      } else {
        for (std::size_t i = 0; i < params.size(); ++i) {
          velocity[i] = options.momentum * velocity[i] + grad[i];
          params[i] = static_cast<float>(params[i] - lr * velocity[i]);
        }
      }
      epoch_loss += loss;
      ++batches;
    }
    report.final_loss = epoch_loss / static_cast<double>(batches);
  }
  report.train_accuracy = accuracy(model, data);
  report.heldout_accuracy = heldout.empty() ? 0.0 : accuracy(model, heldout);
  return report;
}

}  // namespace bss
