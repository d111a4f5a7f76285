// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bss/image.hpp"

namespace bss {

struct LabeledImage {
  ImageTensor image;
  int label = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  ImageTensor grad;  // d loss / d input, same shape as the input
};

/// Deterministic differentiable classifier. Implementations must be safe to
/// call concurrently from several threads once constructed.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Shape input_shape() const = 0;
  virtual int num_classes() const = 0;
  virtual std::vector<float> forward(const ImageTensor& img) const = 0;
  /// Softmax cross-entropy of the logits against `label` and its gradient
  /// with respect to the input image.
  virtual LossAndGrad loss_and_input_grad(const ImageTensor& img, int label) const = 0;

  int predict(const ImageTensor& img) const;
};

/// Numerically stable -log softmax(logits)[label] and its logit gradient.
double softmax_cross_entropy(std::span<const double> logits, int label,
                             std::span<double> dlogits);
int argmax(std::span<const float> values);

void check_label(int label, int num_classes);
void check_input_shape(const Shape& expected, const ImageTensor& img);

/// Logits = W * vec(x) + b. Used as an analytic oracle model in tests and as
/// the simplest possible surrogate.
class LinearClassifier final : public Classifier {
 public:
  LinearClassifier(Shape input, int num_classes, std::vector<float> weights,
                   std::vector<float> bias);

  Shape input_shape() const override { return input_; }
  int num_classes() const override { return num_classes_; }
  std::vector<float> forward(const ImageTensor& img) const override;
  LossAndGrad loss_and_input_grad(const ImageTensor& img, int label) const override;

  std::span<const float> weights() const { return weights_; }

 private:
  Shape input_;
  int num_classes_;
  std::vector<float> weights_;
  std::vector<float> bias_;
};

/// Wraps a classifier and counts gradient and forward evaluations. The
/// counters feed the cost accounting of the harness.
class CountingClassifier final : public Classifier {
 public:
  explicit CountingClassifier(const Classifier& inner) : inner_(inner) {}

  Shape input_shape() const override { return inner_.input_shape(); }
  int num_classes() const override { return inner_.num_classes(); }
  std::vector<float> forward(const ImageTensor& img) const override;
  LossAndGrad loss_and_input_grad(const ImageTensor& img, int label) const override;

  std::uint64_t gradient_evals() const { return grad_evals_.load(); }
  std::uint64_t forward_evals() const { return forward_evals_.load(); }
  void reset() {
    grad_evals_ = 0;
    forward_evals_ = 0;
  }

 private:
  const Classifier& inner_;
  mutable std::atomic<std::uint64_t> grad_evals_{0};
  mutable std::atomic<std::uint64_t> forward_evals_{0};
};

}  // namespace bss
