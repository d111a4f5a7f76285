// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bss/classifier.hpp"
#include "bss/image.hpp"
#include "bss/methods.hpp"
#include "bss/rng.hpp"

namespace bss {

/// How the per-transform gradient is mapped back onto the perturbation.
///  - Exact:      through the adjoint of the sampled transform
///  - ImageSpace: the gradient at the transformed image is used as-is
enum class GradMode { Exact, ImageSpace };

std::string to_string(GradMode mode);
GradMode parse_grad_mode(const std::string& s);

struct AttackConfig {
  double epsilon = 16.0 / 255.0;
  int iterations = 10;
  std::optional<double> alpha;  // defaults to epsilon / iterations
  double mu = 1.0;
  GradMode grad_mode = GradMode::Exact;

  double step_size() const;
  void validate() const;
};

struct AttackState {
  ImageTensor delta;
  ImageTensor momentum;
  int t = 0;

  static AttackState zeros(const Shape& shape);
};

/// Mean over the method's N transforms of d J(f(T_k(clamp01(x + delta))), y) / d delta.
/// The clamp is passed straight through. Per-transform gradients are reduced
/// in index order, so the result does not depend on `threads`.
ImageTensor ensemble_gradient(const Classifier& model, const ImageTensor& x,
                              const ImageTensor& delta, int label, const TransformMethod& method,
                              const Rng& stream, GradMode mode = GradMode::Exact,
                              int threads = 1);

/// g <- mu * g + grad / ||grad||_1, delta <- clip(delta + alpha * sign(g), -eps, eps).
/// sign(0) = 0; a zero gradient contributes nothing to the momentum.
AttackState mifgsm_step(AttackState state, const ImageTensor& grad, const AttackConfig& cfg);

struct AttackResult {
  ImageTensor adversarial;         // clamp01(x + delta_T)
  ImageTensor delta;               // delta_T
  std::vector<float> delta_linf;   // ||delta_t||_inf after every step
};

using AttackObserver = std::function<void(const AttackState&)>;

/// T iterations from delta = g = 0. Iteration t draws its transforms from
/// stream.child(t).
AttackResult run_attack(const Classifier& model, const LabeledImage& sample,
                        const TransformMethod& method, const AttackConfig& cfg,
                        const Rng& stream, const AttackObserver& observer = {},
                        int threads = 1);

/// Per model, the percentage of samples with argmax f(x_adv) != y.
std::vector<double> evaluate_success(std::span<const Classifier* const> models,
                                     std::span<const LabeledImage> adversarial);

}  // namespace bss
