// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/attack.hpp"

#include <algorithm>
#include <cmath>

#include "bss/error.hpp"
#include "bss/parallel.hpp"

namespace bss {

std::string to_string(GradMode mode) {
  return mode == GradMode::Exact ? "exact" : "image-space";
}

GradMode parse_grad_mode(const std::string& s) {
  if (s == "exact") return GradMode::Exact;
  if (s == "image-space" || s == "image") return GradMode::ImageSpace;
  throw ArgumentError("unknown grad mode '" + s + "' (expected exact|image-space)");
}

double AttackConfig::step_size() const {
  if (alpha) return *alpha;
  return iterations > 0 ? epsilon / iterations : 0.0;
}

void AttackConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (iterations < 0) throw ConfigError("iteration count must be >= 0");
  if (alpha && !(*alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!std::isfinite(mu) || mu < 0.0) throw ConfigError("mu must be finite and >= 0");
}

AttackState AttackState::zeros(const Shape& shape) {
  return AttackState{ImageTensor(shape), ImageTensor(shape), 0};
}

ImageTensor ensemble_gradient(const Classifier& model, const ImageTensor& x,
                              const ImageTensor& delta, int label, const TransformMethod& method,
                              const Rng& stream, GradMode mode, int threads) {
  if (x.shape() != delta.shape()) {
    throw ShapeError("x " + to_string(x.shape()) + " and delta " + to_string(delta.shape()) +
                     " differ");
  }
  const ImageTensor input = clamp01(x + delta);
  const int n = method.number_scale();
  std::vector<ImageTensor> grads(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t k) {
    Rng rng = stream.child(k);
    const auto warp = method.sample(input.shape(), static_cast<int>(k), rng);
    const ImageTensor transformed = warp->forward(input);
    LossAndGrad lg = model.loss_and_input_grad(transformed, label);
    grads[k] = mode == GradMode::Exact ? warp->backward(lg.grad) : std::move(lg.grad);
    if (grads[k].shape() != input.shape()) {
      throw ShapeError(method.name() + " changed the image shape");
    }
  });

  std::vector<double> sum(input.size(), 0.0);
  for (const auto& g : grads) {
    const auto d = g.data();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
  }
  ImageTensor out(input.shape());
  auto o = out.data();
  for (std::size_t i = 0; i < sum.size(); ++i) o[i] = static_cast<float>(sum[i] / n);
  return out;
}

AttackState mifgsm_step(AttackState state, const ImageTensor& grad, const AttackConfig& cfg) {
  if (grad.shape() != state.delta.shape() || state.momentum.shape() != state.delta.shape()) {
    throw ShapeError("mifgsm_step: gradient, momentum and delta shapes differ");
  }
  const auto g = grad.data();
  for (float v : g) {
    if (!std::isfinite(v)) throw NumericError("non-finite gradient in mifgsm_step");
  }
  const double norm = l1_norm(grad);
  const float alpha = static_cast<float>(cfg.step_size());
  const float eps = static_cast<float>(cfg.epsilon);
  auto m = state.momentum.data();
  auto d = state.delta.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double normalized = norm > 0.0 ? g[i] / norm : 0.0;
    m[i] = static_cast<float>(cfg.mu * m[i] + normalized);
    const float sign = static_cast<float>((m[i] > 0.0f) - (m[i] < 0.0f));
    d[i] = std::clamp(d[i] + alpha * sign, -eps, eps);
  }
  ++state.t;
  return state;
}

AttackResult run_attack(const Classifier& model, const LabeledImage& sample,
                        const TransformMethod& method, const AttackConfig& cfg,
                        const Rng& stream, const AttackObserver& observer, int threads) {
  cfg.validate();
  check_label(sample.label, model.num_classes());
  method.validate(sample.image.shape());
  AttackState state = AttackState::zeros(sample.image.shape());
  AttackResult result;
  result.delta_linf.reserve(cfg.iterations);
  for (int t = 0; t < cfg.iterations; ++t) {
    const ImageTensor grad = ensemble_gradient(model, sample.image, state.delta, sample.label,
                                               method, stream.child(t), cfg.grad_mode, threads);
    state = mifgsm_step(std::move(state), grad, cfg);
    result.delta_linf.push_back(linf_norm(state.delta));
    if (observer) observer(state);
  }
  result.adversarial = clamp01(sample.image + state.delta);
  result.delta = std::move(state.delta);
  return result;
}

std::vector<double> evaluate_success(std::span<const Classifier* const> models,
                                     std::span<const LabeledImage> adversarial) {
  std::vector<double> rates;
  rates.reserve(models.size());
  for (const Classifier* model : models) {
    if (adversarial.empty()) {
      rates.push_back(0.0);
      continue;
    }
    std::size_t fooled = 0;
    for (const auto& ex : adversarial) fooled += model->predict(ex.image) != ex.label;
    rates.push_back(100.0 * static_cast<double>(fooled) / static_cast<double>(adversarial.size()));
  }
  return rates;
}

}  // namespace bss
