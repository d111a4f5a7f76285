// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "bss/error.hpp"

namespace bss {

int Classifier::predict(const ImageTensor& img) const { return argmax(forward(img)); }

double softmax_cross_entropy(std::span<const double> logits, int label,
                             std::span<double> dlogits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z - top);
  const double log_denom = std::log(denom);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    dlogits[i] = std::exp(logits[i] - top - log_denom);
  }
  dlogits[label] -= 1.0;
  return -(logits[label] - top - log_denom);
}

int argmax(std::span<const float> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

void check_label(int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw ArgumentError("label " + std::to_string(label) + " outside [0, " +
                        std::to_string(num_classes) + ")");
  }
}

void check_input_shape(const Shape& expected, const ImageTensor& img) {
  if (img.shape() != expected) {
    throw ShapeError("model expects input " + to_string(expected) + ", got " +
                     to_string(img.shape()));
  }
}

LinearClassifier::LinearClassifier(Shape input, int num_classes, std::vector<float> weights,
                                   std::vector<float> bias)
    : input_(input), num_classes_(num_classes), weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (num_classes < 1) throw ArgumentError("linear classifier needs >= 1 class");
  if (weights_.size() != input.size() * num_classes ||
      bias_.size() != static_cast<std::size_t>(num_classes)) {
    throw ShapeError("linear classifier parameter size mismatch");
  }
}

std::vector<float> LinearClassifier::forward(const ImageTensor& img) const {
  check_input_shape(input_, img);
  const std::size_t d = input_.size();
  std::vector<float> logits(num_classes_);
  for (int k = 0; k < num_classes_; ++k) {
    double z = bias_[k];
    const float* w = weights_.data() + k * d;
    for (std::size_t i = 0; i < d; ++i) z += static_cast<double>(w[i]) * img.data()[i];
    logits[k] = static_cast<float>(z);
  }
  return logits;
}

LossAndGrad LinearClassifier::loss_and_input_grad(const ImageTensor& img, int label) const {
  check_label(label, num_classes_);
  const auto logits_f = forward(img);
  std::vector<double> logits(logits_f.begin(), logits_f.end());
  std::vector<double> dlogits(num_classes_);
  LossAndGrad out;
  out.loss = softmax_cross_entropy(logits, label, dlogits);
  out.grad = ImageTensor(input_);
  const std::size_t d = input_.size();
  auto g = out.grad.data();
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int k = 0; k < num_classes_; ++k) acc += dlogits[k] * weights_[k * d + i];
    g[i] = static_cast<float>(acc);
  }
  return out;
}

std::vector<float> CountingClassifier::forward(const ImageTensor& img) const {
  forward_evals_.fetch_add(1, std::memory_order_relaxed);
  return inner_.forward(img);
}

LossAndGrad CountingClassifier::loss_and_input_grad(const ImageTensor& img, int label) const {
  grad_evals_.fetch_add(1, std::memory_order_relaxed);
  return inner_.loss_and_input_grad(img, label);
}

}  // namespace bss
