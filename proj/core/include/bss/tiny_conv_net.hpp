// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bss/classifier.hpp"
#include "bss/rng.hpp"

namespace bss {

/// conv3x3(pad 1) -> ReLU -> avgpool2 -> conv3x3(pad 1) -> ReLU -> avgpool2 -> dense.
struct ConvNetArch {
  int in_channels = 3;
  int height = 32;
  int width = 32;
  int conv1_channels = 8;
  int conv2_channels = 16;
  int num_classes = 10;

  void validate() const;
  std::size_t param_count() const;
  Shape input_shape() const { return {in_channels, height, width}; }
  bool operator==(const ConvNetArch&) const = default;
};

class TinyConvNet final : public Classifier {
 public:
  /// All-zero parameters.
  explicit TinyConvNet(ConvNetArch arch);
  TinyConvNet(ConvNetArch arch, std::vector<float> params);
  /// He-uniform weights, zero biases.
  static TinyConvNet initialized(ConvNetArch arch, Rng& rng);

  const ConvNetArch& arch() const { return arch_; }
  std::span<const float> params() const { return params_; }
  std::span<float> params() { return params_; }
  /// FNV-1a over the raw parameter bytes.
  std::uint64_t checksum() const;

  Shape input_shape() const override { return arch_.input_shape(); }
  int num_classes() const override { return arch_.num_classes; }
  std::vector<float> forward(const ImageTensor& img) const override;
  LossAndGrad loss_and_input_grad(const ImageTensor& img, int label) const override;

  /// Adds d loss / d params for one example into `param_grad` and returns the
  /// loss. Used by training.
  double accumulate_param_grad(const ImageTensor& img, int label,
                               std::span<double> param_grad) const;

  /// Mean loss over a batch and the mean parameter gradient.
  double batch_loss_and_param_grad(std::span<const LabeledImage> batch,
                                   std::span<double> param_grad) const;

  // 64-bit shadow path, used only for gradient verification.
  double loss_f64(std::span<const double> input, int label) const;
  double loss_and_input_grad_f64(std::span<const double> input, int label,
                                 std::span<double> grad) const;
  /// Sign pattern of every ReLU pre-activation; two inputs with equal
  /// patterns lie in the same linear region of the network body.
  std::vector<std::uint8_t> relu_pattern_f64(std::span<const double> input) const;

 private:
  ConvNetArch arch_;
  std::vector<float> params_;
};

enum class Optimizer { Sgd, Adam };

struct TrainOptions {
  Optimizer optimizer = Optimizer::Sgd;
  int epochs = 10;
  double learning_rate = 0.05;
  int batch_size = 32;
  double momentum = 0.9;  // SGD momentum, or Adam's beta1
  bool cosine_decay = false;  // anneal the learning rate to 0 over all steps
  // Random resized crop per example and epoch; 1 and 1 disable it.
  double crop_min_area = 1.0;
  double crop_max_aspect = 1.0;
  // Random piecewise axis stretch: pieces per axis and share jitter; 0 disables.
  int stretch_pieces = 0;
  double stretch_limit = 0.0;
};

struct TrainReport {
  double final_loss = 0.0;
  double train_accuracy = 0.0;    // percent
  double heldout_accuracy = 0.0;  // percent; 0 when no held-out set is given
};

/// Mini-batch SGD with momentum or Adam, single-threaded and deterministic
/// given the stream. Throws TrainingError if the loss becomes non-finite.
TrainReport train(TinyConvNet& model, std::span<const LabeledImage> data,
                  std::span<const LabeledImage> heldout, const TrainOptions& options, Rng& rng);

/// Percentage of samples whose argmax prediction equals the label.
double accuracy(const Classifier& model, std::span<const LabeledImage> data);

}  // namespace bss
